#include "rrmix/rng.hpp"

#include <cmath>
#include <limits>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailCut = 4.0;  // beyond this, inverse-cdf loses precision
}  // namespace

double Rng::normal() { return norm_icdf(uniform()); }

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

double Rng::gamma(double shape, double rate) {
  if (shape < 1.0) {
    // Boost to shape+1 and rescale (Marsaglia-Tsang augmentation).
    double u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double Rng::inverse_gamma(double shape, double scale) {
  return 1.0 / gamma(shape, scale);
}

double Rng::beta(double a, double b) {
  double x = gamma(a, 1.0);
  double y = gamma(b, 1.0);
  return x / (x + y);
}

double Rng::inverse_gaussian(double mu, double lambda) {
  double nu = normal();
  double y = nu * nu;
  double x = mu + mu * mu * y / (2.0 * lambda) -
             mu / (2.0 * lambda) *
                 std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
  if (uniform() <= mu / (mu + x)) return x;
  return mu * mu / x;
}

namespace {

// Standardized truncated normal on (a, b) with a >= kTailCut: truncated
// exponential proposal at rate a, accepted with exp(-(x-a)^2/2). The
// proposal is drawn by inverse cdf restricted to (a, b), so the loop cannot
// stall even for very narrow intervals.
double tail_sample(Rng& rng, double a, double b) {
  for (;;) {
    double x;
    if (b == kInf) {
      x = a - std::log(rng.uniform()) / a;
    } else {
      double m = -std::expm1(-a * (b - a));  // proposal mass on (a,b)
      x = a - std::log1p(-rng.uniform() * m) / a;
    }
    double diff = x - a;
    if (std::log(rng.uniform()) <= -0.5 * diff * diff) return x;
  }
}

double std_truncated(Rng& rng, double a, double b) {
  if (a >= kTailCut) return tail_sample(rng, a, b);
  if (b <= -kTailCut) return -tail_sample(rng, -b, -a);
  double fa = (a == -kInf) ? 0.0 : norm_cdf(a);
  double fb = (b == kInf) ? 1.0 : norm_cdf(b);
  double p = fa + rng.uniform() * (fb - fa);
  double x = norm_icdf(p);
  // Guard against the quantile landing a hair outside through rounding.
  if (x <= a) x = std::nextafter(a, kInf);
  if (x > b) x = b;
  return x;
}

}  // namespace

double Rng::truncated_normal(double mean, double sd, double lo, double hi) {
  if (!(lo < hi)) {
    throw DomainError("truncated_normal: empty interval");
  }
  double a = (lo == -kInf) ? -kInf : (lo - mean) / sd;
  double b = (hi == kInf) ? kInf : (hi - mean) / sd;
  return mean + sd * std_truncated(*this, a, b);
}

int Rng::categorical(const double* w, int k) {
  double u = uniform();
  double acc = 0.0;
  for (int j = 0; j < k - 1; ++j) {
    acc += w[j];
    if (u <= acc) return j;
  }
  return k - 1;
}

}  // namespace rrmix
