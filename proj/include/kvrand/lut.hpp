#ifndef KVRAND_LUT_HPP
#define KVRAND_LUT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kvrand/inversion.hpp"
#include "kvrand/rng.hpp"
#include "kvrand/sampler.hpp"

namespace kvrand {

/// Level sweep configuration for the look-up-table sampler. The table is
/// over the density itself, not its cumulative.
struct LevelPlan {
  FunctionTable table;
  ScalarFunction f;
  std::size_t levels = 1;
  double dx_r = 0.0;
};

/// Tabulates f on grid_n nodes; n_d >= 1, dx_r > 0.
LevelPlan make_level_plan(ScalarFunction f, double x_min, double x_max, std::size_t grid_n,
                          std::size_t n_d, double dx_r);

/// The n_d ordinates swept by the plan, evenly spaced from the smallest to
/// the largest tabulated value. A single level sits halfway between them.
std::vector<double> level_values(const LevelPlan& plan);

/// [x_min, crossing roots..., x_max] for one level. Tangent and
/// near-extremum roots, and roots sitting on the domain ends, are dropped.
std::vector<double> level_boundaries(const LevelPlan& plan, double level);

/// Whether the density starts above the level: the sign of f - level at the
/// first grid node where they differ.
bool starts_above(const LevelPlan& plan, double level);

/**
 * Fills the selected intervals of a boundary list with points spaced dx_r,
 * starting at each interval's left end: floor(len / dx_r) + 1 points per
 * interval. Intervals 1, 3, 5, ... are selected when first_above, otherwise
 * 2, 4, 6, .... Returns the number of points appended.
 */
std::size_t fill_intervals(std::span<const double> boundaries, bool first_above, double dx_r,
                           std::vector<double>& out);

/// Point count fill_intervals would produce, without producing them.
std::size_t count_fill(std::span<const double> boundaries, bool first_above, double dx_r);

struct SampleTable {
  std::vector<double> samples;
  std::vector<std::size_t> per_level_counts;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Calls sink(level index, points of that level) in level order.
void for_each_level(const LevelPlan& plan,
                    const std::function<void(std::size_t, std::span<const double>)>& sink);

SampleTable build_sample_table(const LevelPlan& plan);

/// Total table size and per-level counts without storing the samples.
std::vector<std::size_t> count_sample_table(const LevelPlan& plan);

/// Uniform index retrieval with replacement; throws EmptyTable.
SampleBatch draw_from_table(const SampleTable& table, UniformSource& rng, std::size_t count);

/// Fisher-Yates permutation of the samples driven by rng.
SampleTable shuffle_table(SampleTable table, UniformSource& rng);

/**
 * Vose's alias method: O(1) draws from a weighted discrete distribution.
 * Not needed for the table sampler (all stored points are equiprobable) but
 * useful for weighted tables.
 */
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(UniformSource& rng) const;
  std::size_t size() const noexcept { return probability_.size(); }
  /// Probability of index i implied by the tables.
  double probability(std::size_t i) const;

 private:
  std::vector<double> probability_;
  std::vector<std::size_t> alias_;
};

}  // namespace kvrand

#endif  // KVRAND_LUT_HPP
