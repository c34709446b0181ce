#ifndef KVRAND_CDF_HPP
#define KVRAND_CDF_HPP

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kvrand/expression.hpp"
#include "kvrand/inversion.hpp"

namespace kvrand {

/// Where a density comes from, and the domain it is truncated to.
struct DistributionSpec {
  enum class Kind { Builtin, Expression, Tabulated };
  enum class Builtin { Normal, Airy, Uniform };

  Kind kind = Kind::Builtin;
  Builtin builtin = Builtin::Uniform;
  double mu = 0.0;
  double sigma = 1.0;
  std::string expression;
  std::vector<double> table_x;
  std::vector<double> table_pdf;
  double x_min = 0.0;
  double x_max = 1.0;

  static DistributionSpec normal(double mu, double sigma, double x_min, double x_max);
  static DistributionSpec airy(double x_min, double x_max);
  static DistributionSpec uniform(double x_min, double x_max);
  static DistributionSpec from_expression(std::string text, double x_min, double x_max);
  /// Domain defaults to the first and last abscissa.
  static DistributionSpec tabulated(std::vector<double> x, std::vector<double> pdf);
};

/// Checks the spec and returns its (unnormalized, possibly signed) density.
/// Expression text is parsed here, so parse errors surface from this call.
ScalarFunction density_function(const DistributionSpec& spec);

/// Two-column "x pdf" text: whitespace or comma separated, '#' comments,
/// strictly ascending x, at least two rows.
DistributionSpec read_tabulated(std::istream& in);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * Normalized cumulative distribution on [x_min, x_max].
 *
 * g_values = (G* - G*_min) / (G*_max - G*_min) where G* integrates the
 * density plus `shift`, and shift = max(0, -z_min) lifts a sign-changing
 * density to be nonnegative. After excise_plateaus the zero-density stretches
 * are listed in `excised` and removed from x_nodes.
 */
struct CumulativeTable {
  std::vector<double> x_nodes;
  std::vector<double> g_values;
  double z_min = 0.0;
  double shift = 0.0;
  double gstar_min = 0.0;
  double gstar_max = 0.0;
  std::vector<Interval> excised;
  double x_min = 0.0;
  double x_max = 0.0;

  std::size_t size() const noexcept { return x_nodes.size(); }
};

/**
 * Samples the density on n uniform nodes and accumulates it with the
 * composite trapezoid rule. The normal builtin uses its erf closed form
 * instead of quadrature.
 */
CumulativeTable build_cdf(const DistributionSpec& spec, std::size_t n);

/// Default plateau tolerance on normalized values: 16 eps, i.e.
/// 16 eps (G*_max - G*_min) on the unnormalized cumulative.
double default_plateau_tolerance();

/**
 * Collapses every maximal run of steps smaller than tol to the run's left
 * node, recording the removed stretch in `excised`. The result is strictly
 * increasing and renormalized to [0, 1].
 */
CumulativeTable excise_plateaus(const CumulativeTable& table, double tol);

/**
 * Translation between original abscissae and the compressed axis in which
 * every excised interval has zero length.
 */
class CoordinateMap {
 public:
  CoordinateMap() = default;
  explicit CoordinateMap(std::vector<Interval> excised);

  bool identity() const noexcept { return excised_.empty(); }
  const std::vector<Interval>& excised() const noexcept { return excised_; }

  double compress(double x) const;
  double expand(double t) const {
    if (excised_.empty()) return t;
    return expand_slow(t);
  }

 private:
  double expand_slow(double t) const;

  std::vector<Interval> excised_;
  std::vector<double> starts_;  // compressed position of each interval
  std::vector<double> offsets_; // total excised length up to and including it
};

/// Piecewise-linear cumulative on the compressed axis.
class CompressedCdf {
 public:
  explicit CompressedCdf(const CumulativeTable& table);

  double operator()(double t) const;
  double t_min() const noexcept { return t_.front(); }
  double t_max() const noexcept { return t_.back(); }
  std::span<const double> nodes() const noexcept { return t_; }
  std::span<const double> values() const noexcept { return g_; }

 private:
  std::vector<double> t_;
  std::vector<double> g_;
};

}  // namespace kvrand

#endif  // KVRAND_CDF_HPP
