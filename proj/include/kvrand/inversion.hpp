#ifndef KVRAND_INVERSION_HPP
#define KVRAND_INVERSION_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kvrand/kvector.hpp"

namespace kvrand {

using ScalarFunction = std::function<double(double)>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/**
 * A function sampled on a uniform grid plus the k-vector over its values.
 *
 * delta is the largest jump between consecutive samples (plus 4 eps): a
 * search window of half-width delta / 2 around any attained level contains
 * at least one sample next to every crossing of that level.
 */
struct FunctionTable {
  std::vector<double> x;
  std::vector<double> y;
  double delta = 0.0;
  double delta_x = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  SortedDatabase db;
  KVectorIndex kv;

  std::size_t size() const noexcept { return x.size(); }
  double y_min() const noexcept { return db.min(); }
  double y_max() const noexcept { return db.max(); }
};

/// Samples f at n uniformly spaced nodes of [x_min, x_max] (endpoints exact).
FunctionTable tabulate(const ScalarFunction& f, double x_min, double x_max, std::size_t n);

/// Same, from already evaluated values at the uniform nodes.
FunctionTable tabulate(std::span<const double> y, double x_min, double x_max);

enum class RootKind {
  /// f - level changes sign inside the bracket (or at a grid node).
  Crossing,
  /// f touches the level at a grid node without crossing it.
  Tangent,
  /// Samples came close to the level near an extremum but never reached it.
  NearExtremum,
};

struct RootEstimate {
  Point bracket_lo;
  Point bracket_hi;
  /// Linear estimate from the bracket until refined.
  double refined_x = 0.0;
  std::vector<Point> cluster_points;
  RootKind kind = RootKind::Crossing;
  /// A grid node equals the level exactly; refined_x is that node.
  bool exact = false;

  bool extremum_adjacent() const noexcept { return kind != RootKind::Crossing; }
};

/**
 * Groups the samples within delta / 2 of y_r into one cluster per root and
 * brackets each crossing between neighbouring grid nodes.
 *
 * A cluster holding several crossings yields one estimate per crossing, so
 * the result always lists every sign change of y - y_r in grid order.
 * Throws NoRootFound when nothing lies in the search window.
 */
std::vector<RootEstimate> find_root_clusters(const FunctionTable& table, double y_r);

struct RefineResult {
  double x = 0.0;
  int iterations = 0;
  bool converged = false;
};

/**
 * Regula falsi inside the estimate's bracket, switching to a bisection step
 * after three consecutive updates of the same endpoint. Stops when
 * |f(x) - y_r| <= tol or the bracket is narrower than tol. Running out of
 * iterations is reported through RefineResult::converged, not thrown.
 */
RefineResult refine_root(const ScalarFunction& f, const RootEstimate& est, double y_r,
                         double tol = 1e-12, int max_iter = 100);

/// Newton steps safeguarded by the bracket; falls back to bisection when a
/// step would leave it.
RefineResult refine_root_newton(const ScalarFunction& f, const ScalarFunction& df,
                                const RootEstimate& est, double y_r, double tol = 1e-12,
                                int max_iter = 100);

/// find_root_clusters followed by refine_root on every estimate that is not
/// a near-extremum miss. refined_x holds the refined root.
std::vector<RootEstimate> invert(const FunctionTable& table, const ScalarFunction& f,
                                 double y_r, double tol = 1e-12, int max_iter = 100);

}  // namespace kvrand

#endif  // KVRAND_INVERSION_HPP
