#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "kvrand/error.hpp"
#include "kvrand/inversion.hpp"
#include "kvrand/special.hpp"
#include "oracles.hpp"

using namespace kvrand;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const double kPi = std::numbers::pi;

double gauss_cdf(double x) { return 0.5 * (1.0 + std::erf(x / (0.2 * std::sqrt(2.0)))); }

}  // namespace

TEST_CASE("tabulate the identity") {
  const auto t = tabulate([](double x) { return x; }, 0.0, 1.0, 11);
  REQUIRE(t.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) CHECK(t.y[i] == doctest::Approx(0.1 * i).epsilon(1e-15));
  CHECK(t.x.back() == 1.0);
  CHECK(t.delta == doctest::Approx(0.1 + 4 * kEps).epsilon(1e-12));
  CHECK(t.delta >= 0.1);
  CHECK(t.delta_x == doctest::Approx(0.1));
  for (std::size_t i = 0; i + 1 < 11; ++i) {
    CHECK(std::abs((t.x[i + 1] - t.x[i]) - t.delta_x) <= 4 * kEps * 1.0);
  }
}

TEST_CASE("tabulate reports non-finite values") {
  try {
    tabulate([](double x) { return 1.0 / x; }, 0.0, 1.0, 5);
    FAIL("expected NonFiniteFunctionValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteFunctionValue);
  }
}

TEST_CASE("identity has one root") {
  const ScalarFunction f = [](double x) { return x; };
  const auto t = tabulate(f, 0.0, 1.0, 101);
  const auto roots = invert(t, f, 0.5);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].refined_x == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sine on two periods has four roots of one half") {
  const ScalarFunction f = [](double x) { return std::sin(x); };
  const auto t = tabulate(f, 0.0, 4 * kPi, 4001);
  const auto clusters = find_root_clusters(t, 0.5);
  CHECK(clusters.size() == 4);
  const auto roots = invert(t, f, 0.5);
  REQUIRE(roots.size() == 4);
  const auto want = oracle::dense_roots(f, 0.0, 4 * kPi, 0.5);
  REQUIRE(want.size() == 4);
  const double exact[] = {kPi / 6, 5 * kPi / 6, kPi / 6 + 2 * kPi, 5 * kPi / 6 + 2 * kPi};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(roots[i].refined_x - want[i]) < 1e-9);
    CHECK(std::abs(roots[i].refined_x - exact[i]) < 1e-9);
    CHECK(roots[i].kind == RootKind::Crossing);
    CHECK(roots[i].bracket_lo.x < roots[i].bracket_hi.x);
    CHECK(roots[i].refined_x >= roots[i].bracket_lo.x);
    CHECK(roots[i].refined_x <= roots[i].bracket_hi.x);
  }
}

TEST_CASE("gaussian cdf inverted at 0.2") {
  const ScalarFunction f = gauss_cdf;
  const auto t = tabulate(f, -1.0, 1.0, 2001);
  const auto clusters = find_root_clusters(t, 0.2);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].bracket_lo.x <= -0.16832);
  CHECK(clusters[0].bracket_hi.x >= -0.16832);
  const auto r = refine_root(f, clusters[0], 0.2, 1e-10);
  CHECK(r.converged);
  CHECK(std::abs(r.x - oracle::normal_quantile(0.2, 0.0, 0.2)) < 1e-9);
  CHECK(std::abs(r.x + 0.16832) < 1e-5);
}

TEST_CASE("cluster count equals sign changes") {
  const ScalarFunction f = [](double x) { return std::sin(x) + std::cos(5 * x); };
  const auto t = tabulate(f, -2 * kPi, 2 * kPi, 20001);
  for (double level : {-1.5, -0.7, 0.0, 0.3, 1.1, 1.7}) {
    const auto roots = invert(t, f, level);
    std::size_t crossings = 0;
    for (const auto& r : roots) crossings += r.kind == RootKind::Crossing;
    std::size_t changes = 0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      changes += (t.y[i] < level) != (t.y[i + 1] < level);
    }
    CHECK(crossings == changes);
    const auto want = oracle::dense_roots(f, -2 * kPi, 2 * kPi, level);
    REQUIRE(crossings == want.size());
    std::size_t j = 0;
    for (const auto& r : roots) {
      if (r.kind != RootKind::Crossing) continue;
      CHECK(std::abs(r.refined_x - want[j++]) < 1e-9);
    }
  }
}

TEST_CASE("level near a maximum is flagged, not returned as a crossing") {
  // Peak value 1 at x = 0.5 between grid nodes: every sample is below 1.
  const ScalarFunction f = [](double x) { return 1.0 - (x - 0.5) * (x - 0.5); };
  const auto t = tabulate(f, 0.0, 1.0, 100);
  const auto roots = find_root_clusters(t, t.y_max() + 1e-7);
  REQUIRE(!roots.empty());
  for (const auto& r : roots) {
    CHECK(r.kind != RootKind::Crossing);
    CHECK(r.extremum_adjacent());
  }
}

TEST_CASE("level touching a grid-node maximum is a tangent") {
  const ScalarFunction f = [](double x) { return -std::abs(x); };
  const auto t = tabulate(f, -1.0, 1.0, 21);
  const auto roots = find_root_clusters(t, 0.0);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].kind == RootKind::Tangent);
  CHECK(roots[0].exact);
  CHECK(roots[0].refined_x == 0.0);
}

TEST_CASE("no root outside the attained range") {
  const ScalarFunction f = [](double x) { return x; };
  const auto t = tabulate(f, 0.0, 1.0, 11);
  try {
    find_root_clusters(t, 3.0);
    FAIL("expected NoRootFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRootFound);
  }
}

TEST_CASE("refinement on analytic roots") {
  RootEstimate est;
  est.bracket_lo = {1.0, 1.0};
  est.bracket_hi = {2.0, 4.0};
  const auto sq = refine_root([](double x) { return x * x; }, est, 2.0, 1e-13);
  CHECK(sq.converged);
  CHECK(std::abs(sq.x - std::sqrt(2.0)) < 1e-12);

  est.bracket_lo = {3.0, std::sin(3.0)};
  est.bracket_hi = {3.3, std::sin(3.3)};
  const auto pi = refine_root([](double x) { return std::sin(x); }, est, 0.0);
  CHECK(std::abs(pi.x - kPi) < 1e-12);
  CHECK(pi.x >= 3.0);
  CHECK(pi.x <= 3.3);
}

TEST_CASE("refinement needs a sign change") {
  RootEstimate est;
  est.bracket_lo = {0.0, 1.0};
  est.bracket_hi = {1.0, 2.0};
  try {
    refine_root([](double x) { return x + 1.0; }, est, 0.0);
    FAIL("expected NoSignChange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSignChange);
  }
}

TEST_CASE("newton refinement stays in its bracket") {
  RootEstimate est;
  est.bracket_lo = {1.0, 1.0};
  est.bracket_hi = {2.0, 4.0};
  const auto r = refine_root_newton([](double x) { return x * x; },
                                    [](double x) { return 2 * x; }, est, 2.0);
  CHECK(r.converged);
  CHECK(std::abs(r.x - std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("stagnating regula falsi is rescued by bisection") {
  // Strongly convex: plain regula falsi keeps updating one end.
  const ScalarFunction f = [](double x) { return std::pow(x, 12) - 0.5; };
  RootEstimate est;
  est.bracket_lo = {0.0, f(0.0) + 0.5};
  est.bracket_hi = {1.5, f(1.5) + 0.5};
  const auto r = refine_root(f, est, 0.0, 1e-13, 100);
  CHECK(r.converged);
  CHECK(std::abs(r.x - std::pow(0.5, 1.0 / 12.0)) < 1e-12);
  CHECK(r.iterations < 100);
}
