#include "kvrand/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mu, double sigma) {
  // erfc keeps the lower tail accurate; identical to the erf form otherwise.
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

namespace {

long double airy_series(long double z) {
  constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
  constexpr long double kDAi0 = -0.258819403792806798405183560189203963L;
  const long double z3 = z * z * z;
  long double f_term = 1.0L;
  long double g_term = z;
  long double f_sum = f_term;
  long double g_sum = g_term;
  for (int k = 0; k < 200; ++k) {
    const long double k3 = 3.0L * k;
    f_term *= z3 / ((k3 + 2.0L) * (k3 + 3.0L));
    g_term *= z3 / ((k3 + 3.0L) * (k3 + 4.0L));
    f_sum += f_term;
    g_sum += g_term;
    if (k > 4 && std::abs(f_term) + std::abs(g_term) <
                     1e-22L * (std::abs(f_sum) + std::abs(g_sum))) {
      break;
    }
  }
  return kAi0 * f_sum + kDAi0 * g_sum;
}

// Large-argument expansions in zeta = 2/3 |x|^(3/2), coefficients
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)). Summed until the terms
// stop shrinking.
long double airy_asymptotic(long double x) {
  const long double ax = std::abs(x);
  const long double zeta = 2.0L / 3.0L * ax * std::sqrt(ax);
  const long double pi = std::numbers::pi_v<long double>;
  const long double front = 1.0L / (std::sqrt(pi) * std::sqrt(std::sqrt(ax)));
  long double u = 1.0L;
  long double power = 1.0L;
  long double even = 1.0L;  // sum (-1)^k u_2k / zeta^2k
  long double odd = 0.0L;   // sum (-1)^k u_2k+1 / zeta^2k+1
  long double alternating = 1.0L;
  long double last = 1.0L;
  for (int k = 1; k < 60; ++k) {
    u *= (6.0L * k - 5) * (6.0L * k - 3) * (6.0L * k - 1) / (216.0L * k * (2.0L * k - 1));
    power /= zeta;
    const long double term = u * power;
    if (term > last) break;
    last = term;
    alternating += (k % 2 ? -term : term);
    if (k % 2) {
      odd += ((k / 2) % 2 ? -term : term);
    } else {
      even += ((k / 2) % 2 ? -term : term);
    }
    if (term < 1e-21L) break;
  }
  if (x > 0) return 0.5L * front * std::exp(-zeta) * alternating;
  const long double phase = zeta - pi / 4.0L;
  return front * (std::cos(phase) * even + std::sin(phase) * odd);
}

}  // namespace

double airy_ai(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::DensityEvaluationError, "airy_ai of a non-finite argument");
  }
  // The series cancels badly once its terms grow like exp(2/3 |x|^(3/2)).
  if (x < -9.0 || x > 6.5) return static_cast<double>(airy_asymptotic(x));
  return static_cast<double>(airy_series(x));
}

}  // namespace kvrand
