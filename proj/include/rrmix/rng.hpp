#pragma once

#include <cstdint>

namespace rrmix {

// Deterministic counter-splittable generator (xoshiro256++ seeded through
// splitmix64). Every sampler in the project draws through this class so that
// a (seed, stream) pair fully determines the output, independent of thread
// count or platform library details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { seed_state(seed, 0, 0, 0); }

  // Derive an independent stream from up to three stream labels. Used for
  // per-loan splitting inside a Gibbs sweep.
  Rng(std::uint64_t seed, std::uint64_t s1, std::uint64_t s2 = 0,
      std::uint64_t s3 = 0) {
    seed_state(seed, s1, s2, s3);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1); never returns an exact endpoint.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the high-precision quantile.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate);

  // Gamma with shape/rate parameterization (Marsaglia-Tsang).
  double gamma(double shape, double rate);

  // Inverse gamma with shape and scale: 1/x ~ Gamma(shape, rate=scale).
  double inverse_gamma(double shape, double scale);

  double beta(double a, double b);

  // Inverse Gaussian with mean mu and shape lambda (Michael-Schucany-Haas).
  double inverse_gaussian(double mu, double lambda);

  // N(mean, sd^2) truncated to (lo, hi); either bound may be infinite.
  // Inverse-cdf in the bulk, exponential rejection once the interval lies
  // beyond 4 standard deviations.
  double truncated_normal(double mean, double sd, double lo, double hi);

  // Index in [0, k) drawn with the given probabilities (must sum to ~1).
  int categorical(const double* w, int k);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  void seed_state(std::uint64_t seed, std::uint64_t s1, std::uint64_t s2,
                  std::uint64_t s3) {
    std::uint64_t x = seed;
    x ^= splitmix(x) + 0x9e3779b97f4a7c15ULL * s1;
    x ^= splitmix(x) + 0xbf58476d1ce4e5b9ULL * s2;
    x ^= splitmix(x) + 0x94d049bb133111ebULL * s3;
    for (auto& w : s_) w = splitmix(x);
  }

  std::uint64_t s_[4];
};

}  // namespace rrmix
