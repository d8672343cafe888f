#include "rrmix/normal.hpp"

#include <cmath>
#include <limits>

#include "rrmix/errors.hpp"

namespace rrmix {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kSqrt2Pi = 2.5066282746310005024;

// Acklam's rational approximation to the normal quantile.
double icdf_initial(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("norm_icdf: p must lie strictly in (0,1)");
  }
  // Reflect the upper half onto the lower: 1-p is exact for p >= 0.5, and
  // refining in the small tail avoids the cancellation that computing
  // cdf(x) - p near 1 would suffer.
  if (p > 0.5) return -norm_icdf(1.0 - p);
  double x = icdf_initial(p);
  // Two Halley refinements against erfc push the result to near machine
  // precision across the whole range.
  for (int it = 0; it < 2; ++it) {
    double e = 0.5 * std::erfc(-x / kSqrt2) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double norm_logpdf(double x) { return -0.5 * (kLog2Pi + x * x); }

double norm_logpdf(double x, double mu, double sigma2) {
  double r = x - mu;
  return -0.5 * (kLog2Pi + std::log(sigma2) + r * r / sigma2);
}

double log_norm_cdf(double x) {
  // erfc stays accurate until it underflows near x = -37.5; beyond that the
  // asymptotic series (truncation error < 1e-12 there) takes over.
  if (x > -37.0) {
    return std::log(norm_cdf(x));
  }
  // Asymptotic series for the lower tail:
  //   Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)
  double x2 = x * x;
  double s = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) +
             105.0 / (x2 * x2 * x2 * x2);
  return norm_logpdf(x) - std::log(-x) + std::log(s);
}

double log_norm_interval(double lo, double hi) {
  if (!(lo < hi)) return -std::numeric_limits<double>::infinity();
  if (lo == -std::numeric_limits<double>::infinity() &&
      hi == std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  // Work in the tail that keeps both cdf values small.
  if (lo >= 0.0) {
    // Upper-tail masses: Phi(-lo) - Phi(-hi), with log-space fallback when
    // both underflow as plain doubles.
    double la = log_norm_cdf(-lo);
    double lb = (hi == std::numeric_limits<double>::infinity())
                    ? -std::numeric_limits<double>::infinity()
                    : log_norm_cdf(-hi);
    if (lb == -std::numeric_limits<double>::infinity()) return la;
    return la + std::log1p(-std::exp(lb - la));
  }
  if (hi <= 0.0) {
    return log_norm_interval(-hi, -lo);
  }
  // Interval straddles zero; mass is order one, direct evaluation is safe.
  double mass = norm_cdf(hi) - norm_cdf(lo);
  return std::log(mass);
}

}  // namespace rrmix
