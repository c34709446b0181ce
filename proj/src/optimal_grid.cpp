#include "kvrand/optimal_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_range(const OptimalGrid& grid, double y_r) {
  if (!(y_r >= grid.y_min && y_r <= grid.y_max)) {
    throw Error(ErrorCode::OutOfRange, "ordinate " + std::to_string(y_r) +
                                           " outside grid range [" +
                                           std::to_string(grid.y_min) + ", " +
                                           std::to_string(grid.y_max) + "]");
  }
}

// Grows the adjacent pair (b, b + 1) to the n_e nodes closest to y_r in
// ordinate, keeping the window contiguous.
std::vector<std::size_t> widen(const OptimalGrid& grid, std::size_t b, double y_r,
                               std::size_t n_e) {
  const auto& y = grid.y_nodes;
  if (n_e == 1) {
    return {std::abs(y[b] - y_r) <= std::abs(y[b + 1] - y_r) ? b : b + 1};
  }
  std::size_t lo = b;
  std::size_t hi = b + 1;
  while (hi - lo + 1 < n_e) {
    const bool can_lo = lo > 0;
    const bool can_hi = hi + 1 < y.size();
    if (!can_lo && !can_hi) break;
    if (can_lo && (!can_hi || std::abs(y[lo - 1] - y_r) <= std::abs(y[hi + 1] - y_r))) {
      --lo;
    } else {
      ++hi;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(hi - lo + 1);
  for (std::size_t i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

}  // namespace

OptimalGrid make_optimal_grid(std::vector<double> x_nodes, std::vector<double> y_nodes,
                              std::size_t n_d) {
  if (x_nodes.size() != y_nodes.size()) {
    throw Error(ErrorCode::InvalidArgument, "grid node arrays differ in length");
  }
  if (x_nodes.size() < 2) {
    throw Error(ErrorCode::EmptyGrid, "optimal grid needs at least 2 nodes");
  }
  if (n_d < 2) {
    throw Error(ErrorCode::InvalidArgument, "optimal grid needs at least 2 levels");
  }
  OptimalGrid g;
  g.x_nodes = std::move(x_nodes);
  g.y_nodes = std::move(y_nodes);
  g.levels = n_d;
  g.db = build_sorted_database(g.y_nodes);
  g.kv = build_kvector(g.db);
  g.y_min = g.db.min();
  g.y_max = g.db.max();
  g.delta_opt = (g.y_max - g.y_min) / static_cast<double>(n_d - 1) + 4.0 * kEps;
  g.monotone = std::is_sorted(g.y_nodes.begin(), g.y_nodes.end());

  const double n = static_cast<double>(g.size());
  const double span = g.y_max - g.y_min + 2.0 * g.kv.delta_eps;
  g.inv_slope = (n - 1.0) / span;
  g.inv_intercept = 1.0 - g.inv_slope * (g.y_min - g.kv.delta_eps);
  return g;
}

OptimalGrid build_optimal_grid(const FunctionTable& table, const ScalarFunction& f,
                               std::size_t n_d, double tol) {
  if (n_d < 2) {
    throw Error(ErrorCode::InvalidArgument, "optimal grid needs at least 2 levels");
  }
  const double y_lo = table.y_min();
  const double y_hi = table.y_max();

  struct Node {
    double x;
    double y;
  };
  std::vector<Node> nodes;
  nodes.reserve(n_d);
  for (std::size_t i = 0; i < n_d; ++i) {
    const double level =
        (i + 1 == n_d) ? y_hi
                       : y_lo + (y_hi - y_lo) * static_cast<double>(i) / static_cast<double>(n_d - 1);
    const auto roots = invert(table, f, level, tol);
    double previous = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
      if (r.kind == RootKind::NearExtremum) continue;
      if (r.refined_x - previous < 0.5 * table.delta_x) continue;
      nodes.push_back({r.refined_x, level});
      previous = r.refined_x;
    }
  }
  if (nodes.size() < 2) {
    throw Error(ErrorCode::EmptyGrid, "optimal grid construction found fewer than 2 roots");
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });

  std::vector<double> xs(nodes.size());
  std::vector<double> ys(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    xs[i] = nodes[i].x;
    ys[i] = nodes[i].y;
  }
  return make_optimal_grid(std::move(xs), std::move(ys), n_d);
}

std::vector<std::vector<std::size_t>> query_n_e(const OptimalGrid& grid, double y_r,
                                                std::size_t n_e) {
  check_range(grid, y_r);
  if (n_e == 0) throw Error(ErrorCode::InvalidArgument, "n_e must be at least 1");

  const auto& y = grid.y_nodes;
  const std::size_t count = y.size();
  const double radius = 0.5 * static_cast<double>(n_e) * grid.delta_opt;
  const auto [begin, end] = sorted_range(grid.kv, grid.db, y_r - radius, y_r + radius, true);

  std::vector<std::vector<std::size_t>> out;
  if (begin == end) {
    if (!grid.monotone) {
      throw Error(ErrorCode::NoRootFound, "no grid node near " + std::to_string(y_r));
    }
    out.push_back(widen(grid, grid.bracket_index(y_r), y_r, n_e));
    return out;
  }

  const auto order = grid.db.sort_index();
  std::vector<std::size_t> hits(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                order.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(hits.begin(), hits.end());

  const auto below = [&](std::size_t j) { return y[j] <= y_r; };
  std::size_t first = 0;
  while (first < hits.size()) {
    std::size_t last = first;
    while (last + 1 < hits.size() && hits[last + 1] == hits[last] + 1) ++last;
    const std::size_t w_lo = hits[first] > 0 ? hits[first] - 1 : 0;
    const std::size_t w_hi = std::min(hits[last] + 1, count - 1);

    const std::size_t found_before = out.size();
    for (std::size_t j = w_lo; j < w_hi; ++j) {
      if (below(j) != below(j + 1)) out.push_back(widen(grid, j, y_r, n_e));
    }
    if (out.size() == found_before) {
      // The level touches the group at a node without crossing it (a
      // maximum, or the top of a monotone grid).
      for (std::size_t j = w_lo; j <= w_hi; ++j) {
        if (y[j] == y_r) out.push_back(widen(grid, j + 1 < count ? j : j - 1, y_r, n_e));
      }
    }
    first = last + 1;
  }
  return out;
}

BracketPair direct_bracket(const OptimalGrid& grid, double y_r) {
  if (!grid.monotone) {
    throw Error(ErrorCode::NotMonotone, "direct bracketing needs a monotone grid");
  }
  check_range(grid, y_r);
  const std::size_t b = grid.bracket_index(y_r);
  return {{grid.x_nodes[b], grid.y_nodes[b]}, {grid.x_nodes[b + 1], grid.y_nodes[b + 1]}, b};
}

std::size_t search_bracket_index(const OptimalGrid& grid, double y_r) {
  const auto& y = grid.y_nodes;
  const std::size_t last = y.size() - 2;
  const auto [begin, end] =
      sorted_range(grid.kv, grid.db, y_r - grid.delta_opt, y_r + grid.delta_opt, true);
  // On a monotone grid sorted positions are node indices.
  std::size_t j = begin == end ? grid.bracket_index(y_r) : std::min(end, last + 1);
  while (j > 0 && y[j] > y_r) --j;
  while (j < last + 1 && y[j + 1] <= y_r) ++j;
  return std::min(j, last);
}

}  // namespace kvrand
