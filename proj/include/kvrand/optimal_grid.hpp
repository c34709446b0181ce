#ifndef KVRAND_OPTIMAL_GRID_HPP
#define KVRAND_OPTIMAL_GRID_HPP

#include <cstddef>
#include <vector>

#include "kvrand/inversion.hpp"
#include "kvrand/kvector.hpp"

namespace kvrand {

/**
 * Node set made of the roots of n_d equally spaced ordinate levels.
 *
 * Because the levels are equally spaced, a search window of half-width
 * n_e * delta_opt / 2 around any level returns n_e nodes next to every root.
 * Nodes are stored in ascending x; y_nodes holds the level each node solves.
 *
 * On monotone grids the inverse k-vector line (inv_slope, inv_intercept)
 * maps an ordinate straight to the bracketing node pair. inv_intercept uses
 * 1-based node numbering.
 */
struct OptimalGrid {
  std::vector<double> x_nodes;
  std::vector<double> y_nodes;
  std::size_t levels = 0;
  double delta_opt = 0.0;
  bool monotone = false;
  double inv_slope = 0.0;
  double inv_intercept = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  SortedDatabase db;
  KVectorIndex kv;

  std::size_t size() const noexcept { return x_nodes.size(); }

  /// 0-based index b of the monotone bracket (b, b + 1): the largest node
  /// with y <= y_r, clamped to [0, size() - 2]. No k-vector access.
  std::size_t bracket_index(double y_r) const noexcept {
    const std::size_t last = y_nodes.size() - 2;
    const double t = inv_slope * y_r + inv_intercept - 1.0;
    std::size_t b = 0;
    if (t >= static_cast<double>(last)) {
      b = last;
    } else if (t > 0.0) {
      b = static_cast<std::size_t>(t);
    }
    // The padded line can land one node off next to a level.
    while (b > 0 && y_nodes[b] > y_r) --b;
    while (b < last && y_nodes[b + 1] <= y_r) ++b;
    return b;
  }
};

struct BracketPair {
  Point lo;
  Point hi;
  std::size_t lo_index = 0;
};

/**
 * Solves f(x) = y_d(i) for n_d levels spread evenly over the table's range
 * and keeps every crossing and tangent root as a node. Two roots of the same
 * level closer than delta_x / 2 are merged.
 */
OptimalGrid build_optimal_grid(const FunctionTable& table, const ScalarFunction& f,
                               std::size_t n_d, double tol = 1e-12);

/// Rebuilds the derived fields from stored nodes (x ascending).
OptimalGrid make_optimal_grid(std::vector<double> x_nodes, std::vector<double> y_nodes,
                              std::size_t n_d);

/**
 * Node indices next to each root of y_r, exactly n_e per root when the grid
 * has that many nodes, grouped by root in ascending x. For n_e == 2 each
 * pair is adjacent and brackets its root.
 */
std::vector<std::vector<std::size_t>> query_n_e(const OptimalGrid& grid, double y_r,
                                                std::size_t n_e);

/// Bracket of y_r through the inverse line; the grid must be monotone.
BracketPair direct_bracket(const OptimalGrid& grid, double y_r);

/// Monotone bracket found through the k-vector search window instead of the
/// inverse line. Always equal to bracket_index(); does not allocate.
std::size_t search_bracket_index(const OptimalGrid& grid, double y_r);

}  // namespace kvrand

#endif  // KVRAND_OPTIMAL_GRID_HPP
