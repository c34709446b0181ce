#ifndef KVRAND_STATS_HPP
#define KVRAND_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kvrand {

/// Bins are half-open [e_i, e_{i+1}) except the last, which is closed.
/// Values outside [e_0, e_last] are counted in underflow/overflow.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  std::uint64_t total() const noexcept;
  std::size_t bins() const noexcept { return counts.size(); }
};

/// Throws BadEdges unless edges are finite, strictly increasing and >= 2.
Histogram histogram(std::span<const double> samples, std::span<const double> edges);
/// n_bins equal-width edges over [lo, hi].
std::vector<double> uniform_edges(double lo, double hi, std::size_t n_bins);

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample KS against a continuous CDF; throws EmptySample.
KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square with dof = bins - 1 - fitted. Throws ZeroExpected.
ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> expected, std::size_t fitted = 0);

/// Expected bin counts for n draws from a CDF restricted to the edge range.
std::vector<double> expected_counts(std::span<const double> edges,
                                    const std::function<double(double)>& cdf, double n);

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stddev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // excess
};

/// Two-pass moments; throws EmptySample.
Moments moments(std::span<const double> samples);

}  // namespace kvrand

#endif  // KVRAND_STATS_HPP
