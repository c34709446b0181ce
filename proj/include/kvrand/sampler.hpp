#ifndef KVRAND_SAMPLER_HPP
#define KVRAND_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kvrand/cdf.hpp"
#include "kvrand/optimal_grid.hpp"
#include "kvrand/rng.hpp"

namespace kvrand {

enum class SamplerMode : std::uint8_t {
  /// Bracket through the k-vector search window, linear interpolation.
  Linear = 0,
  /// Bracket through the inverse line, linear interpolation.
  DirectIndex = 1,
  /// n_e nearest nodes, Lagrange interpolation in the ordinate.
  Lagrange = 2,
};

const char* to_string(SamplerMode mode);
/// Accepts "linear", "direct" and "lagrange".
SamplerMode parse_sampler_mode(std::string_view text);

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t count = 0;
};

/**
 * Inverse-transform sampler over an optimal grid built on a normalized CDF.
 *
 * Node abscissae live on the compressed axis (excised zero-density
 * stretches removed); results are mapped back to the original axis.
 * Immutable; draws only mutate the caller's UniformSource.
 */
class Sampler {
 public:
  Sampler(OptimalGrid grid, SamplerMode mode, std::size_t n_e, CoordinateMap map,
          double x_min, double x_max);

  /// x with CDF(x) = y_r for y_r in [y_min, y_max]; throws OutOfRange.
  double inverse_at(double y_r) const;

  double sample(UniformSource& rng) const { return invert(y_min_ + span_ * rng.next_uniform()); }

  void draw_into(UniformSource& rng, std::span<double> out) const;
  SampleBatch draw(UniformSource& rng, std::size_t count) const;

  /// Same sampler with another mode (and n_e for Lagrange).
  Sampler with_mode(SamplerMode mode, std::size_t n_e) const;

  const OptimalGrid& grid() const noexcept { return grid_; }
  const CoordinateMap& coordinate_map() const noexcept { return map_; }
  SamplerMode mode() const noexcept { return mode_; }
  std::size_t n_e() const noexcept { return n_e_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }

 private:
  double invert(double y_r) const;
  double interpolate_linear(std::size_t b, double y_r) const;
  double interpolate_lagrange(std::size_t b, double y_r) const;

  OptimalGrid grid_;
  SamplerMode mode_;
  std::size_t n_e_;
  CoordinateMap map_;
  double x_min_;
  double x_max_;
  double y_min_;
  double y_max_;
  double span_;
};

/**
 * Builds the optimal grid over the compressed CDF of `table` (which must be
 * strictly increasing, i.e. already passed through excise_plateaus).
 * grid_n is the size of the uniform table used for root finding; 0 means
 * table.size().
 */
Sampler make_sampler(const CumulativeTable& table, std::size_t n_d, SamplerMode mode,
                     std::size_t n_e = 2, std::size_t grid_n = 0);

/**
 * Optional Newton polish of a sample against the exact CDF: solves
 * cdf(x) = y_r starting from x0, keeping x inside [lo, hi].
 */
double newton_polish(double x0, double y_r, const ScalarFunction& cdf,
                     const ScalarFunction& pdf, double lo, double hi, int iterations = 4);

}  // namespace kvrand

#endif  // KVRAND_SAMPLER_HPP
