#include "jini/special.hpp"

#include <cmath>
#include <stdexcept>

namespace jini {

double digamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("digamma: argument must be positive");
  }
  double acc = 0.0;
  // psi(x) = psi(x+1) - 1/x, lift the argument into the asymptotic range
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ log x - 1/(2x) - sum B_{2k} / (2k x^{2k})
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0 -
             inv2 * (1.0 / 120.0 -
              inv2 * (1.0 / 252.0 -
               inv2 * (1.0 / 240.0 -
                inv2 * (1.0 / 132.0 -
                 inv2 * (691.0 / 32760.0 -
                  inv2 * (1.0 / 12.0)))))));
  return acc + series;
}

double trigamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("trigamma: argument must be positive");
  }
  double acc = 0.0;
  // psi'(x) = psi'(x+1) + 1/x^2
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2k} / x^{2k+1}
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv + 0.5 * inv2;
  series += inv * inv2 * (1.0 / 6.0 -
             inv2 * (1.0 / 30.0 -
              inv2 * (1.0 / 42.0 -
               inv2 * (1.0 / 30.0 -
                inv2 * (5.0 / 66.0 -
                 inv2 * (691.0 / 2730.0 -
                  inv2 * (7.0 / 6.0)))))));
  return acc + series;
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must be in (0,1)");
  }
  // Peter Acklam's rational approximation (relative error < 1.2e-9), then
  // a Newton polish through the erfc-based CDF.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double z;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Newton step: z <- z - (Phi(z) - p) / phi(z)
  const double pdf =
      std::exp(-0.5 * z * z) * 0.39894228040143267794;  // 1/sqrt(2 pi)
  if (pdf > 0.0) {
    z -= (norm_cdf(z) - p) / pdf;
  }
  return z;
}

}  // namespace jini
