#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kvrand/error.hpp"
#include "kvrand/lut.hpp"
#include "kvrand/special.hpp"
#include "kvrand/stats.hpp"
#include "oracles.hpp"

using namespace kvrand;

namespace {

// Level sweep done the slow way: dense sign scan, bisection, parity, fill.
std::vector<double> oracle_level(const ScalarFunction& f, double a, double b, double level,
                                 double dx) {
  std::vector<double> bounds{a};
  for (double r : oracle::dense_roots(f, a, b, level)) {
    if (r > a && r < b) bounds.push_back(r);
  }
  bounds.push_back(b);
  const bool above = f(a) > level;
  std::vector<double> out;
  for (std::size_t i = above ? 0 : 1; i + 1 < bounds.size(); i += 2) {
    const auto steps = static_cast<std::size_t>(std::floor((bounds[i + 1] - bounds[i]) / dx));
    for (std::size_t k = 0; k <= steps; ++k) out.push_back(bounds[i] + k * dx);
  }
  return out;
}

}  // namespace

TEST_CASE("worked example of boundaries, parity and fill") {
  const std::vector<double> bounds{0, 1, 3, 4, 5};
  std::vector<double> out;
  CHECK(fill_intervals(bounds, false, 0.5, out) == 8);
  CHECK(out == std::vector<double>{1, 1.5, 2, 2.5, 3, 4, 4.5, 5});
  CHECK(count_fill(bounds, false, 0.5) == 8);
  out.clear();
  fill_intervals(bounds, true, 0.5, out);
  CHECK(out == std::vector<double>{0, 0.5, 1, 3, 3.5, 4});
}

TEST_CASE("single level on the identity") {
  const auto plan = make_level_plan([](double x) { return x; }, 0.0, 1.0, 101, 1, 0.25);
  CHECK(level_values(plan) == std::vector<double>{0.5});
  const auto t = build_sample_table(plan);
  REQUIRE(t.size() == 3);
  CHECK(t.samples[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t.samples[1] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(t.samples[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(make_level_plan([](double x) { return x; }, 0.0, 1.0, 11, 0, 0.1), Error);
  CHECK_THROWS_AS(make_level_plan([](double x) { return x; }, 0.0, 1.0, 11, 3, 0.0), Error);
}

TEST_CASE("table matches the dense-scan sweep") {
  const ScalarFunction f = [](double x) { return std::sin(x); };
  const double a = 0.3;
  const double b = 6.0;
  const auto plan = make_level_plan(f, a, b, 4001, 7, 0.01);
  const auto t = build_sample_table(plan);
  const auto levels = level_values(plan);
  REQUIRE(t.per_level_counts.size() == levels.size());
  // The first and last levels sit on the sampled extrema, where a dense scan
  // resolves dips between grid nodes that the table cannot see.
  std::size_t offset = t.per_level_counts[0];
  for (std::size_t i = 1; i + 1 < levels.size(); ++i) {
    const auto want = oracle_level(f, a, b, levels[i], 0.01);
    const std::size_t n = t.per_level_counts[i];
    INFO("level " << i << " = " << levels[i]);
    REQUIRE(n == want.size());
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(t.samples[offset + k] - want[k]) < 1e-9);
    offset += n;
  }
  CHECK(offset + t.per_level_counts.back() == t.size());
}

TEST_CASE("per-level counts follow the fill rule and stay above the level") {
  const ScalarFunction f = [](double x) { return airy_ai(x); };
  const auto plan = make_level_plan(f, -8.0, 1.0, 6001, 60, 0.01);
  const auto t = build_sample_table(plan);
  const auto counts = count_sample_table(plan);
  CHECK(counts == t.per_level_counts);
  const auto levels = level_values(plan);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto bounds = level_boundaries(plan, levels[i]);
    std::size_t expect = 0;
    for (std::size_t j = starts_above(plan, levels[i]) ? 0 : 1; j + 1 < bounds.size(); j += 2) {
      expect += static_cast<std::size_t>(std::floor((bounds[j + 1] - bounds[j]) / 0.01)) + 1;
    }
    CHECK(t.per_level_counts[i] == expect);
    for (std::size_t k = 0; k < t.per_level_counts[i]; ++k) {
      const double x = t.samples[offset + k];
      CHECK(x >= -8.0);
      CHECK(x <= 1.0);
      CHECK(f(x) >= levels[i] - 1e-9);
    }
    offset += t.per_level_counts[i];
  }
}

TEST_CASE("draws from a singleton table") {
  SampleTable t;
  t.samples = {7.0};
  UniformSource rng(1, 0);
  const auto batch = draw_from_table(t, rng, 100);
  for (double v : batch.values) CHECK(v == 7.0);
  SampleTable empty;
  try {
    draw_from_table(empty, rng, 1);
    FAIL("expected EmptyTable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTable);
  }
}

TEST_CASE("index retrieval is uniform") {
  SampleTable t;
  for (int i = 0; i < 50; ++i) t.samples.push_back(i);
  UniformSource rng(3, 0);
  const auto batch = draw_from_table(t, rng, 1000000);
  std::vector<std::uint64_t> counts(50, 0);
  for (double v : batch.values) ++counts[static_cast<std::size_t>(v)];
  const std::vector<double> expected(50, 1000000.0 / 50.0);
  CHECK(chi_square(counts, expected).p_value > 0.001);
}

TEST_CASE("draws follow the table's own distribution") {
  const auto plan = make_level_plan([](double x) { return airy_ai(x); }, -8.0, 1.0, 6001, 200,
                                    0.01);
  const auto t = build_sample_table(plan);
  UniformSource rng(17, 0);
  const auto batch = draw_from_table(t, rng, 100000);
  CHECK(ks_two_sample(batch.values, t.samples).p_value > 0.001);
}

TEST_CASE("shuffle keeps the multiset") {
  UniformSource rng(4, 0);
  SampleTable one;
  one.samples = {3.0};
  CHECK(shuffle_table(one, rng).samples == std::vector<double>{3.0});

  SampleTable t;
  for (int i = 1; i <= 10; ++i) t.samples.push_back(i);
  UniformSource r1(10, 0);
  UniformSource r2(10, 0);
  const auto a = shuffle_table(t, r1);
  const auto b = shuffle_table(t, r2);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != t.samples);
  auto sorted = a.samples;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == t.samples);
}

TEST_CASE("shuffle positions are uniform") {
  SampleTable t;
  for (int i = 0; i < 100; ++i) t.samples.push_back(i);
  UniformSource rng(12, 0);
  // Position (in tenths of the array) of elements 0 and 99.
  std::vector<std::uint64_t> first(10, 0);
  std::vector<std::uint64_t> last(10, 0);
  for (int s = 0; s < 20000; ++s) {
    const auto p = shuffle_table(t, rng);
    for (std::size_t i = 0; i < 100; ++i) {
      if (p.samples[i] == 0.0) ++first[i / 10];
      if (p.samples[i] == 99.0) ++last[i / 10];
    }
  }
  const std::vector<double> expected(10, 2000.0);
  CHECK(chi_square(first, expected).p_value > 0.001);
  CHECK(chi_square(last, expected).p_value > 0.001);
}

TEST_CASE("alias table reproduces its weights") {
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0, 0.0};
  const AliasTable alias(w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(alias.probability(i) == doctest::Approx(w[i] / 10.0).epsilon(1e-12));
  }
  UniformSource rng(8, 0);
  std::vector<std::uint64_t> counts(4, 0);
  for (int i = 0; i < 1000000; ++i) {
    const auto k = alias.sample(rng);
    REQUIRE(k < 4);
    ++counts[k];
  }
  const std::vector<double> expected{1e5, 2e5, 3e5, 4e5};
  CHECK(chi_square(counts, expected).p_value > 0.001);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{}), Error);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), Error);
}
