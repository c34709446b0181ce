#ifndef KVRAND_SPECIAL_HPP
#define KVRAND_SPECIAL_HPP

namespace kvrand {

/// Normal density with mean mu and standard deviation sigma.
double normal_pdf(double x, double mu, double sigma);

/// Normal cumulative distribution, 1/2 [1 + erf((x - mu) / (sigma sqrt 2))].
double normal_cdf(double x, double mu, double sigma);

/**
 * Airy function of the first kind. Sums the two Maclaurin series,
 * Ai(x) = Ai(0) f(x) + Ai'(0) g(x), in extended precision on [-9, 6.5] and
 * switches to the large-argument expansions outside. Throws
 * DensityEvaluationError for non-finite x.
 */
double airy_ai(double x);

}  // namespace kvrand

#endif  // KVRAND_SPECIAL_HPP
