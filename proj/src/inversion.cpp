#include "kvrand/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Gap between retrieved nodes (in units of the grid step) above which they
// belong to different roots.
constexpr double kClusterGap = 1.5;

FunctionTable finish_table(std::vector<double> y, double x_min, double x_max) {
  const std::size_t n = y.size();
  FunctionTable t;
  t.x_min = x_min;
  t.x_max = x_max;
  t.delta_x = (x_max - x_min) / static_cast<double>(n - 1);
  t.x.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.x[i] = x_min + static_cast<double>(i) * t.delta_x;
  }
  t.x[n - 1] = x_max;

  double jump = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    jump = std::max(jump, std::abs(y[i + 1] - y[i]));
  }
  t.delta = jump + 4.0 * kEps;
  t.y = std::move(y);
  t.db = build_sorted_database(t.y);
  t.kv = build_kvector(t.db);
  return t;
}

void check_domain(double x_min, double x_max, std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::TooFewElements, "function table needs at least 2 nodes");
  }
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::InvalidRange, "function table needs x_min < x_max");
  }
}

int sign_of(double d) { return (d > 0.0) - (d < 0.0); }

}  // namespace

FunctionTable tabulate(const ScalarFunction& f, double x_min, double x_max, std::size_t n) {
  check_domain(x_min, x_max, n);
  const double dx = (x_max - x_min) / static_cast<double>(n - 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (i + 1 == n) ? x_max : x_min + static_cast<double>(i) * dx;
    y[i] = f(x);
    if (!std::isfinite(y[i])) {
      throw Error(ErrorCode::NonFiniteFunctionValue,
                  "function is not finite at x = " + std::to_string(x));
    }
  }
  return finish_table(std::move(y), x_min, x_max);
}

FunctionTable tabulate(std::span<const double> y, double x_min, double x_max) {
  check_domain(x_min, x_max, y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw Error(ErrorCode::NonFiniteFunctionValue,
                  "function value is not finite at node " + std::to_string(i));
    }
  }
  return finish_table(std::vector<double>(y.begin(), y.end()), x_min, x_max);
}

std::vector<RootEstimate> find_root_clusters(const FunctionTable& table, double y_r) {
  const std::size_t n = table.size();
  const auto [begin, end] =
      sorted_range(table.kv, table.db, y_r - 0.5 * table.delta, y_r + 0.5 * table.delta, true);
  if (begin == end) {
    throw Error(ErrorCode::NoRootFound,
                "level " + std::to_string(y_r) + " is outside the attained range");
  }

  const auto order = table.db.sort_index();
  std::vector<std::size_t> nodes(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
  std::sort(nodes.begin(), nodes.end());

  const auto& x = table.x;
  const auto& y = table.y;
  const auto d = [&](std::size_t j) { return y[j] - y_r; };

  std::vector<RootEstimate> roots;
  std::size_t first = 0;
  while (first < nodes.size()) {
    std::size_t last = first;
    while (last + 1 < nodes.size() &&
           (x[nodes[last + 1]] - x[nodes[last]]) / table.delta_x < kClusterGap) {
      ++last;
    }

    std::vector<Point> cluster;
    cluster.reserve(last - first + 1);
    for (std::size_t c = first; c <= last; ++c) cluster.push_back({x[nodes[c]], y[nodes[c]]});

    const std::size_t lo = nodes[first];
    const std::size_t hi = nodes[last];
    const std::size_t w_lo = lo > 0 ? lo - 1 : 0;
    const std::size_t w_hi = std::min(hi + 1, n - 1);
    const std::size_t found_before = roots.size();

    for (std::size_t j = w_lo; j <= w_hi; ++j) {
      if (d(j) == 0.0) {
        std::size_t r = j;
        while (r + 1 < n && d(r + 1) == 0.0) ++r;
        const int left = j > 0 ? sign_of(d(j - 1)) : 0;
        const int right = r + 1 < n ? sign_of(d(r + 1)) : 0;
        RootEstimate est;
        est.exact = true;
        est.refined_x = x[j];
        est.kind = (left != 0 && left == right) ? RootKind::Tangent : RootKind::Crossing;
        const std::size_t a = j + 1 < n ? j : j - 1;
        est.bracket_lo = {x[a], y[a]};
        est.bracket_hi = {x[a + 1], y[a + 1]};
        est.cluster_points = cluster;
        roots.push_back(std::move(est));
        j = r;
        continue;
      }
      if (j < w_hi && d(j + 1) != 0.0 && sign_of(d(j)) != sign_of(d(j + 1))) {
        RootEstimate est;
        est.bracket_lo = {x[j], y[j]};
        est.bracket_hi = {x[j + 1], y[j + 1]};
        est.refined_x = x[j] + (y_r - y[j]) * (x[j + 1] - x[j]) / (y[j + 1] - y[j]);
        est.cluster_points = cluster;
        roots.push_back(std::move(est));
      }
    }

    if (roots.size() == found_before) {
      // Closest approach to the level: flag and report, never refine.
      std::size_t best = lo;
      for (std::size_t c = first; c <= last; ++c) {
        if (std::abs(d(nodes[c])) < std::abs(d(best))) best = nodes[c];
      }
      const std::size_t a = best + 1 < n ? best : best - 1;
      RootEstimate est;
      est.kind = RootKind::NearExtremum;
      est.bracket_lo = {x[a], y[a]};
      est.bracket_hi = {x[a + 1], y[a + 1]};
      est.refined_x = x[best];
      est.cluster_points = std::move(cluster);
      roots.push_back(std::move(est));
    }
    first = last + 1;
  }
  return roots;
}

RefineResult refine_root(const ScalarFunction& f, const RootEstimate& est, double y_r,
                         double tol, int max_iter) {
  double a = est.bracket_lo.x;
  double b = est.bracket_hi.x;
  double fa = f(a) - y_r;
  double fb = f(b) - y_r;
  if (fa == 0.0) return {a, 0, true};
  if (fb == 0.0) return {b, 0, true};
  if (sign_of(fa) == sign_of(fb)) {
    throw Error(ErrorCode::NoSignChange, "bracket [" + std::to_string(a) + ", " +
                                             std::to_string(b) + "] does not change sign");
  }

  int same_side = 0;
  int last_side = 0;
  RefineResult best{std::abs(fa) < std::abs(fb) ? a : b, 0, false};
  for (int it = 1; it <= max_iter; ++it) {
    best.iterations = it;
    double x = b - fb * (b - a) / (fb - fa);
    if (same_side >= 3 || !(x > a && x < b)) {
      x = 0.5 * (a + b);
      same_side = 0;
    }
    const double fx = f(x) - y_r;
    if (!std::isfinite(fx)) {
      throw Error(ErrorCode::NonFiniteFunctionValue,
                  "function is not finite at x = " + std::to_string(x));
    }
    best.x = x;
    if (std::abs(fx) <= tol) {
      best.converged = true;
      return best;
    }
    const int side = (sign_of(fx) == sign_of(fa)) ? -1 : 1;
    if (side < 0) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    same_side = (side == last_side) ? same_side + 1 : 1;
    last_side = side;
    if (b - a <= tol) {
      best.x = std::abs(fa) < std::abs(fb) ? a : b;
      best.converged = true;
      return best;
    }
  }
  return best;
}

RefineResult refine_root_newton(const ScalarFunction& f, const ScalarFunction& df,
                                const RootEstimate& est, double y_r, double tol,
                                int max_iter) {
  double a = est.bracket_lo.x;
  double b = est.bracket_hi.x;
  double fa = f(a) - y_r;
  const double fb = f(b) - y_r;
  if (fa == 0.0) return {a, 0, true};
  if (fb == 0.0) return {b, 0, true};
  if (sign_of(fa) == sign_of(fb)) {
    throw Error(ErrorCode::NoSignChange, "bracket [" + std::to_string(a) + ", " +
                                             std::to_string(b) + "] does not change sign");
  }

  double x = std::clamp(est.refined_x, a, b);
  RefineResult result{x, 0, false};
  for (int it = 1; it <= max_iter; ++it) {
    result.iterations = it;
    const double fx = f(x) - y_r;
    if (std::abs(fx) <= tol) {
      result.x = x;
      result.converged = true;
      return result;
    }
    if (sign_of(fx) == sign_of(fa)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double slope = df(x);
    double next = x - fx / slope;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::abs(next - x);
    x = next;
    result.x = x;
    if (step <= tol || b - a <= tol) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

std::vector<RootEstimate> invert(const FunctionTable& table, const ScalarFunction& f,
                                 double y_r, double tol, int max_iter) {
  auto roots = find_root_clusters(table, y_r);
  for (auto& r : roots) {
    if (r.kind == RootKind::NearExtremum || r.exact) continue;
    r.refined_x = refine_root(f, r, y_r, tol, max_iter).x;
  }
  return roots;
}

}  // namespace kvrand
