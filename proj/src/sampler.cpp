#include "kvrand/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

const char* to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::Linear: return "linear";
    case SamplerMode::DirectIndex: return "direct";
    case SamplerMode::Lagrange: return "lagrange";
  }
  return "?";
}

SamplerMode parse_sampler_mode(std::string_view text) {
  if (text == "linear") return SamplerMode::Linear;
  if (text == "direct") return SamplerMode::DirectIndex;
  if (text == "lagrange") return SamplerMode::Lagrange;
  throw Error(ErrorCode::InvalidArgument, "unknown sampler mode '" + std::string(text) + "'");
}

Sampler::Sampler(OptimalGrid grid, SamplerMode mode, std::size_t n_e, CoordinateMap map,
                 double x_min, double x_max)
    : grid_(std::move(grid)),
      mode_(mode),
      n_e_(n_e),
      map_(std::move(map)),
      x_min_(x_min),
      x_max_(x_max) {
  if (!grid_.monotone) {
    throw Error(ErrorCode::NotMonotone, "sampler grid must be monotone");
  }
  if (mode_ == SamplerMode::Lagrange && (n_e_ < 2 || n_e_ > grid_.size())) {
    throw Error(ErrorCode::InvalidArgument,
                "Lagrange sampling needs 2 <= n_e <= node count, got n_e = " + std::to_string(n_e_));
  }
  if (mode_ != SamplerMode::Lagrange) n_e_ = 2;
  y_min_ = grid_.y_min;
  y_max_ = grid_.y_max;
  span_ = y_max_ - y_min_;
}

Sampler Sampler::with_mode(SamplerMode mode, std::size_t n_e) const {
  return Sampler(grid_, mode, n_e, map_, x_min_, x_max_);
}

double Sampler::interpolate_linear(std::size_t b, double y_r) const {
  const double xb = grid_.x_nodes[b];
  const double yb = grid_.y_nodes[b];
  const double xt = grid_.x_nodes[b + 1];
  const double yt = grid_.y_nodes[b + 1];
  if (yt == yb) {
    throw Error(ErrorCode::DegenerateBracket,
                "zero-height bracket at node " + std::to_string(b));
  }
  return xb + (y_r - yb) / (yt - yb) * (xt - xb);
}

double Sampler::interpolate_lagrange(std::size_t b, double y_r) const {
  const auto& xs = grid_.x_nodes;
  const auto& ys = grid_.y_nodes;
  // n_e nodes closest in ordinate; contiguous because the grid is monotone.
  std::size_t lo = b;
  std::size_t hi = b + 1;
  while (hi - lo + 1 < n_e_) {
    const bool can_lo = lo > 0;
    const bool can_hi = hi + 1 < ys.size();
    if (can_lo && (!can_hi || y_r - ys[lo - 1] <= ys[hi + 1] - y_r)) {
      --lo;
    } else {
      ++hi;
    }
  }
  double x = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    double weight = 1.0;
    for (std::size_t m = lo; m <= hi; ++m) {
      if (m == i) continue;
      weight *= (y_r - ys[m]) / (ys[i] - ys[m]);
    }
    x += xs[i] * weight;
  }
  // A high-order polynomial can overshoot near steep tails; never leave the
  // bracket.
  return std::clamp(x, xs[b], xs[b + 1]);
}

double Sampler::invert(double y_r) const {
  double t = 0.0;
  switch (mode_) {
    case SamplerMode::DirectIndex:
      t = interpolate_linear(grid_.bracket_index(y_r), y_r);
      break;
    case SamplerMode::Linear:
      t = interpolate_linear(search_bracket_index(grid_, y_r), y_r);
      break;
    case SamplerMode::Lagrange:
      t = interpolate_lagrange(search_bracket_index(grid_, y_r), y_r);
      break;
  }
  return map_.expand(t);
}

double Sampler::inverse_at(double y_r) const {
  if (!(y_r >= y_min_ && y_r <= y_max_)) {
    throw Error(ErrorCode::OutOfRange, "ordinate " + std::to_string(y_r) + " outside [" +
                                           std::to_string(y_min_) + ", " +
                                           std::to_string(y_max_) + "]");
  }
  return invert(y_r);
}

void Sampler::draw_into(UniformSource& rng, std::span<double> out) const {
  for (double& v : out) v = sample(rng);
}

SampleBatch Sampler::draw(UniformSource& rng, std::size_t count) const {
  SampleBatch batch;
  batch.seed = rng.seed();
  batch.stream_id = rng.stream_id();
  batch.count = count;
  batch.values.resize(count);
  draw_into(rng, batch.values);
  return batch;
}

Sampler make_sampler(const CumulativeTable& table, std::size_t n_d, SamplerMode mode,
                     std::size_t n_e, std::size_t grid_n) {
  for (std::size_t i = 0; i + 1 < table.g_values.size(); ++i) {
    if (!(table.g_values[i] < table.g_values[i + 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "cumulative table must be strictly increasing; run excise_plateaus first");
    }
  }
  const CompressedCdf cdf(table);
  const ScalarFunction f = [&cdf](double t) { return cdf(t); };
  const std::size_t n = grid_n == 0 ? table.size() : grid_n;
  const FunctionTable ft = tabulate(f, cdf.t_min(), cdf.t_max(), n);
  OptimalGrid grid = build_optimal_grid(ft, f, n_d);
  return Sampler(std::move(grid), mode, n_e, CoordinateMap(table.excised), table.x_min,
                 table.x_max);
}

double newton_polish(double x0, double y_r, const ScalarFunction& cdf, const ScalarFunction& pdf,
                     double lo, double hi, int iterations) {
  double x = x0;
  for (int i = 0; i < iterations; ++i) {
    const double slope = pdf(x);
    if (!(slope > 0.0)) break;
    const double next = std::clamp(x - (cdf(x) - y_r) / slope, lo, hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

}  // namespace kvrand
