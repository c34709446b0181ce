#include "kvrand/lut.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

LevelPlan make_level_plan(ScalarFunction f, double x_min, double x_max, std::size_t grid_n,
                          std::size_t n_d, double dx_r) {
  if (n_d < 1) throw Error(ErrorCode::InvalidArgument, "level plan needs at least one level");
  if (!(dx_r > 0.0) || !std::isfinite(dx_r)) {
    throw Error(ErrorCode::InvalidArgument, "fill spacing dx_r must be positive");
  }
  LevelPlan plan;
  plan.table = tabulate(f, x_min, x_max, grid_n);
  plan.f = std::move(f);
  plan.levels = n_d;
  plan.dx_r = dx_r;
  return plan;
}

std::vector<double> level_values(const LevelPlan& plan) {
  const double lo = plan.table.y_min();
  const double hi = plan.table.y_max();
  const std::size_t n_d = plan.levels;
  if (n_d == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(n_d);
  for (std::size_t i = 0; i < n_d; ++i) {
    out[i] = (i + 1 == n_d) ? hi
                            : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_d - 1);
  }
  return out;
}

std::vector<double> level_boundaries(const LevelPlan& plan, double level) {
  const auto& t = plan.table;
  std::vector<double> bounds{t.x_min};
  for (const auto& r : invert(t, plan.f, level)) {
    if (r.kind != RootKind::Crossing) continue;
    if (r.refined_x <= t.x_min || r.refined_x >= t.x_max) continue;
    bounds.push_back(r.refined_x);
  }
  std::sort(bounds.begin() + 1, bounds.end());
  bounds.push_back(t.x_max);
  return bounds;
}

bool starts_above(const LevelPlan& plan, double level) {
  for (double y : plan.table.y) {
    if (y != level) return y > level;
  }
  return true;
}

std::size_t count_fill(std::span<const double> boundaries, bool first_above, double dx_r) {
  std::size_t total = 0;
  for (std::size_t i = first_above ? 0 : 1; i + 1 < boundaries.size(); i += 2) {
    const double len = boundaries[i + 1] - boundaries[i];
    total += static_cast<std::size_t>(std::floor(len / dx_r)) + 1;
  }
  return total;
}

std::size_t fill_intervals(std::span<const double> boundaries, bool first_above, double dx_r,
                           std::vector<double>& out) {
  const std::size_t before = out.size();
  for (std::size_t i = first_above ? 0 : 1; i + 1 < boundaries.size(); i += 2) {
    const double a = boundaries[i];
    const auto steps = static_cast<std::size_t>(std::floor((boundaries[i + 1] - a) / dx_r));
    for (std::size_t k = 0; k <= steps; ++k) out.push_back(a + static_cast<double>(k) * dx_r);
  }
  return out.size() - before;
}

void for_each_level(const LevelPlan& plan,
                    const std::function<void(std::size_t, std::span<const double>)>& sink) {
  std::vector<double> points;
  const auto levels = level_values(plan);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    points.clear();
    const auto bounds = level_boundaries(plan, levels[i]);
    fill_intervals(bounds, starts_above(plan, levels[i]), plan.dx_r, points);
    sink(i, points);
  }
}

SampleTable build_sample_table(const LevelPlan& plan) {
  SampleTable table;
  table.per_level_counts.reserve(plan.levels);
  for_each_level(plan, [&](std::size_t, std::span<const double> points) {
    table.samples.insert(table.samples.end(), points.begin(), points.end());
    table.per_level_counts.push_back(points.size());
  });
  if (table.samples.empty()) {
    throw Error(ErrorCode::EmptyTable, "level sweep produced no samples");
  }
  return table;
}

std::vector<std::size_t> count_sample_table(const LevelPlan& plan) {
  std::vector<std::size_t> counts;
  for (double level : level_values(plan)) {
    counts.push_back(count_fill(level_boundaries(plan, level), starts_above(plan, level),
                                plan.dx_r));
  }
  return counts;
}

SampleBatch draw_from_table(const SampleTable& table, UniformSource& rng, std::size_t count) {
  if (table.samples.empty()) throw Error(ErrorCode::EmptyTable, "cannot draw from an empty table");
  SampleBatch batch;
  batch.seed = rng.seed();
  batch.stream_id = rng.stream_id();
  batch.count = count;
  batch.values.resize(count);
  const std::uint64_t n = table.samples.size();
  for (auto& v : batch.values) v = table.samples[rng.next_index(n)];
  return batch;
}

SampleTable shuffle_table(SampleTable table, UniformSource& rng) {
  auto& s = table.samples;
  for (std::size_t i = s.size(); i > 1; --i) {
    const std::size_t j = rng.next_index(i);
    std::swap(s[i - 1], s[j]);
  }
  return table;
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw Error(ErrorCode::EmptyTable, "alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidArgument, "alias weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "alias weights sum to zero");

  probability_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    large.pop_back();
    probability_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::size_t i : large) probability_[i] = 1.0;
  for (std::size_t i : small) probability_[i] = 1.0;  // rounding leftovers
}

std::size_t AliasTable::sample(UniformSource& rng) const {
  const std::size_t column = rng.next_index(probability_.size());
  return rng.next_uniform() < probability_[column] ? column : alias_[column];
}

double AliasTable::probability(std::size_t i) const {
  const double n = static_cast<double>(probability_.size());
  double p = probability_[i] / n;
  for (std::size_t c = 0; c < probability_.size(); ++c) {
    if (alias_[c] == i && c != i) p += (1.0 - probability_[c]) / n;
  }
  return p;
}

}  // namespace kvrand
