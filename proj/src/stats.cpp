#include "kvrand/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "kvrand/error.hpp"

namespace kvrand {

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t t = underflow + overflow;
  for (auto c : counts) t += c;
  return t;
}

namespace {

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw Error(ErrorCode::BadEdges, "histogram needs at least two edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw Error(ErrorCode::BadEdges, "histogram edge is not finite");
    if (i > 0 && !(edges[i - 1] < edges[i])) {
      throw Error(ErrorCode::BadEdges,
                  "histogram edges must be strictly increasing at " + std::to_string(i));
    }
  }
}

}  // namespace

Histogram histogram(std::span<const double> samples, std::span<const double> edges) {
  check_edges(edges);
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  const double lo = edges.front();
  const double hi = edges.back();
  for (double v : samples) {
    if (v < lo || std::isnan(v)) {
      ++h.underflow;
    } else if (v > hi) {
      ++h.overflow;
    } else if (v == hi) {
      ++h.counts.back();
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  }
  return h;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t n_bins) {
  if (n_bins == 0 || !(lo < hi)) throw Error(ErrorCode::BadEdges, "need lo < hi and n_bins >= 1");
  std::vector<double> e(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    e[i] = (i == n_bins) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
  }
  return e;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges poorly; Q is 1 to double precision
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "KS test needs at least one sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sq = std::sqrt(n);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d), s.size()};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "KS test needs two samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d), x.size() + y.size()};
}

ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> expected, std::size_t fitted) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw Error(ErrorCode::InvalidArgument, "observed and expected must have equal nonzero size");
  }
  if (observed.size() < fitted + 2) {
    throw Error(ErrorCode::InvalidArgument, "too few bins for the fitted parameter count");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) {
      throw Error(ErrorCode::ZeroExpected, "expected count is zero in bin " + std::to_string(i));
    }
    const double diff = static_cast<double>(observed[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  ChiSquareResult r;
  r.statistic = stat;
  r.dof = observed.size() - 1 - fitted;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * stat);
  return r;
}

std::vector<double> expected_counts(std::span<const double> edges,
                                    const std::function<double(double)>& cdf, double n) {
  check_edges(edges);
  const double lo = cdf(edges.front());
  const double total = cdf(edges.back()) - lo;
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroExpected, "CDF has no mass over the edges");
  std::vector<double> out(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out[i] = n * (cdf(edges[i + 1]) - cdf(edges[i])) / total;
  }
  return out;
}

Moments moments(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "moments need at least one sample");
  Moments m;
  m.n = samples.size();
  const double n = static_cast<double>(m.n);
  double sum = 0.0;
  for (double v : samples) sum += v;
  m.mean = sum / n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double v : samples) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m.variance = m.n > 1 ? m2 / (n - 1.0) : 0.0;
  m.stddev = std::sqrt(m.variance);
  const double pop = m2 / n;
  if (pop > 0.0) {
    m.skewness = (m3 / n) / std::pow(pop, 1.5);
    m.kurtosis = (m4 / n) / (pop * pop) - 3.0;
  }
  return m;
}

}  // namespace kvrand
