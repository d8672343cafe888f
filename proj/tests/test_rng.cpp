#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "rrmix/rng.hpp"

using namespace rrmix;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
std::pair<double, double> sample_moments(F draw, int n) {
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = draw();
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / n;
  return {mean, sumsq / n - mean * mean};
}
}  // namespace

TEST_CASE("same seed and stream reproduce the sequence exactly") {
  Rng a(42, 7, 3, 1), b(42, 7, 3, 1);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different stream labels give different sequences") {
  Rng a(42, 7, 3, 1), b(42, 7, 3, 2), c(42, 8, 3, 1);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  CHECK(same_ab < 3);
  CHECK(same_ac < 3);
}

TEST_CASE("uniform stays strictly inside (0,1) with mean 1/2") {
  Rng rng(1);
  auto [mean, var] = sample_moments([&] {
    double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    return u;
  }, 200000);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("normal has the right first two moments") {
  Rng rng(2);
  auto [mean, var] = sample_moments([&] { return rng.normal(); }, 200000);
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential mean is 1/rate") {
  Rng rng(3);
  auto [mean, var] = sample_moments([&] { return rng.exponential(2.5); }, 200000);
  CHECK(mean == doctest::Approx(0.4).epsilon(0.02));
  CHECK(var == doctest::Approx(0.16).epsilon(0.05));
}

TEST_CASE("gamma matches shape/rate moments, including shape < 1") {
  Rng rng(4);
  for (double shape : {0.3, 1.0, 2.7, 11.0}) {
    for (double rate : {0.5, 3.0}) {
      auto [mean, var] =
          sample_moments([&] { return rng.gamma(shape, rate); }, 200000);
      CHECK(mean == doctest::Approx(shape / rate).epsilon(0.03));
      CHECK(var == doctest::Approx(shape / (rate * rate)).epsilon(0.08));
    }
  }
}

TEST_CASE("inverse gamma mean is scale/(shape-1)") {
  Rng rng(5);
  auto [mean, var] =
      sample_moments([&] { return rng.inverse_gamma(4.0, 1.5); }, 200000);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.03));
  // Var = b^2 / ((a-1)^2 (a-2)) = 2.25 / (9*2) = 0.125.
  CHECK(var == doctest::Approx(0.125).epsilon(0.15));
}

TEST_CASE("beta moments match") {
  Rng rng(6);
  for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 5.0}, {7.0, 1.5}}) {
    auto [mean, var] = sample_moments([&] { return rng.beta(a, b); }, 200000);
    double m = a / (a + b);
    CHECK(mean == doctest::Approx(m).epsilon(0.02));
    CHECK(var == doctest::Approx(m * (1 - m) / (a + b + 1)).epsilon(0.06));
  }
}

TEST_CASE("inverse Gaussian moments match") {
  Rng rng(7);
  const double mu = 1.7, lambda = 3.2;
  auto [mean, var] =
      sample_moments([&] { return rng.inverse_gaussian(mu, lambda); }, 300000);
  CHECK(mean == doctest::Approx(mu).epsilon(0.02));
  CHECK(var == doctest::Approx(mu * mu * mu / lambda).epsilon(0.08));
}

TEST_CASE("truncated normal respects its bounds") {
  Rng rng(8);
  for (int i = 0; i < 20000; ++i) {
    double x = rng.truncated_normal(0.3, 1.2, -0.5, 0.9);
    REQUIRE(x > -0.5);
    REQUIRE(x <= 0.9);
  }
}

TEST_CASE("truncated normal handles one-sided and deep-tail intervals") {
  Rng rng(9);
  for (int i = 0; i < 20000; ++i) {
    CHECK(rng.truncated_normal(0.0, 1.0, 2.0, kInf) > 2.0);
    CHECK(rng.truncated_normal(0.0, 1.0, -kInf, -1.0) <= -1.0);
  }
  // Narrow interval nine sd out: rejection must not stall.
  for (int i = 0; i < 2000; ++i) {
    double x = rng.truncated_normal(0.0, 1.0, 9.0, 9.05);
    REQUIRE(x > 9.0);
    REQUIRE(x <= 9.05);
  }
}

TEST_CASE("truncated normal matches the analytic truncated mean") {
  Rng rng(10);
  // One-sided truncation at a: mean = phi(a)/(1-Phi(a)) for N(0,1).
  const double a = 1.0;
  auto [mean, var] = sample_moments(
      [&] { return rng.truncated_normal(0.0, 1.0, a, kInf); }, 200000);
  const double phi_a = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
  const double ref = phi_a / 0.15865525393145705;
  CHECK(mean == doctest::Approx(ref).epsilon(0.01));
  (void)var;
}

TEST_CASE("categorical follows the supplied weights") {
  Rng rng(11);
  const double w[4] = {0.1, 0.4, 0.3, 0.2};
  double counts[4] = {0, 0, 0, 0};
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    int k = rng.categorical(w, 4);
    REQUIRE(k >= 0);
    REQUIRE(k < 4);
    counts[k] += 1;
  }
  for (int k = 0; k < 4; ++k) {
    CHECK(counts[k] / n == doctest::Approx(w[k]).epsilon(0.03));
  }
}
