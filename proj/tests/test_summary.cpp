#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rrmix/errors.hpp"
#include "rrmix/ffbs.hpp"
#include "rrmix/gibbs.hpp"
#include "rrmix/summary.hpp"
#include "rrmix/synthgen.hpp"

using namespace rrmix;

namespace {

Chain short_chain(ModelKind mode, int draws, std::uint64_t seed) {
  GenTruth truth = default_gen_truth(4, kNumDeterminants);
  std::vector<int> per(5, 30);
  auto [ds, gt] = generate(truth, per, table1_preset(), seed);
  FitConfig cfg;
  cfg.model = mode;
  cfg.draws = draws;
  cfg.burnin = 50;
  cfg.seed = seed;
  return fit(ds, cfg);
}

}  // namespace

TEST_CASE("HPD of a large normal sample is the central interval") {
  Rng rng(1);
  std::vector<double> draws(1000000);
  for (auto& x : draws) x = rng.normal();
  auto [lo, hi] = hpd_interval(draws, 0.95);
  CHECK(lo == doctest::Approx(-1.96).epsilon(0.011));
  CHECK(hi == doctest::Approx(1.96).epsilon(0.011));
}

TEST_CASE("HPD of an exponential sample hugs zero") {
  Rng rng(2);
  std::vector<double> draws(500000);
  for (auto& x : draws) x = rng.exponential(1.0);
  auto [lo, hi] = hpd_interval(draws, 0.95);
  CHECK(lo < 0.01);  // analytic HPD is (0, -log 0.05)
  CHECK(hi == doctest::Approx(-std::log(0.05)).epsilon(0.02));
  // Strictly shorter than the equal-tailed interval.
  std::sort(draws.begin(), draws.end());
  double eq_lo = draws[static_cast<size_t>(0.025 * draws.size())];
  double eq_hi = draws[static_cast<size_t>(0.975 * draws.size())];
  CHECK(hi - lo < eq_hi - eq_lo);
}

TEST_CASE("HPD handles constants and rejects tiny samples") {
  std::vector<double> draws(60, 3.25);
  auto [lo, hi] = hpd_interval(draws);
  CHECK(lo == 3.25);
  CHECK(hi == 3.25);
  draws.resize(49);
  CHECK_THROWS_AS(hpd_interval(draws), DomainError);
}

TEST_CASE("HPD width is monotone in the mass") {
  Rng rng(3);
  std::vector<double> draws(20000);
  for (auto& x : draws) x = rng.normal() + 0.3 * rng.exponential(1.0);
  double prev = 0.0;
  for (double mass : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    auto [lo, hi] = hpd_interval(draws, mass);
    CHECK(hi - lo >= prev);
    prev = hi - lo;
  }
}

TEST_CASE("ESS of iid draws is close to the sample size") {
  Rng rng(4);
  std::vector<double> draws(10000);
  for (auto& x : draws) x = rng.normal();
  double e = ess(draws);
  CHECK(e / draws.size() > 0.8);
  CHECK(e / draws.size() <= 1.2);
}

TEST_CASE("ESS of an AR(1) chain matches the analytic value") {
  Rng rng(5);
  const double rho = 0.9;
  std::vector<double> draws(40000);
  double x = 0.0;
  for (auto& v : draws) {
    x = rho * x + std::sqrt(1 - rho * rho) * rng.normal();
    v = x;
  }
  double ratio = ess(draws) / draws.size();
  double ref = (1 - rho) / (1 + rho);  // ~0.0526
  CHECK(ratio > 0.5 * ref);
  CHECK(ratio < 1.5 * ref);
}

TEST_CASE("ESS floors at 1 for a constant trace and needs 100 draws") {
  std::vector<double> draws(500, 2.0);
  CHECK(ess(draws) == 1.0);
  PosteriorSummary s = summarize_scalar(draws);
  CHECK(s.flagged);
  draws.resize(99);
  CHECK_THROWS_AS(ess(draws), DomainError);
}

TEST_CASE("significance flag is exactly the zero-exclusion of the HPD") {
  Rng rng(6);
  std::vector<double> pos(2000), straddle(2000);
  for (auto& x : pos) x = 2.0 + 0.3 * rng.normal();
  for (auto& x : straddle) x = 0.1 * rng.normal();
  PosteriorSummary a = summarize_scalar(pos);
  CHECK(a.significant);
  CHECK(a.hpd_lo > 0.0);
  PosteriorSummary b = summarize_scalar(straddle);
  CHECK_FALSE(b.significant);
  CHECK(b.hpd_lo <= 0.0);
  CHECK(b.hpd_hi >= 0.0);
}

TEST_CASE("mixture report weights are a probability vector in posterior mean") {
  Chain chain = short_chain(ModelKind::kStatic, 200, 61);
  MixtureReport rep = mixture_report(chain);
  REQUIRE(static_cast<int>(rep.components.size()) == chain.J);
  double total = 0.0;
  for (const auto& c : rep.components) total += c.weight.mean;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& c : rep.components) {
    CHECK(c.sigma.mean > 0.0);
    if (c.occupied) {
      CHECK(c.mean_rr >= 0.0);
      CHECK(c.mean_rr <= 1.0);
    }
  }
  // Component means come out ascending with the identified mixture.
  for (size_t j = 1; j < rep.components.size(); ++j) {
    CHECK(rep.components[j].mu.mean > rep.components[j - 1].mu.mean);
  }
}

TEST_CASE("mean RR alternative uses Phi of the posterior mean") {
  Chain chain = short_chain(ModelKind::kStatic, 150, 62);
  MixtureReport alt = mixture_report(chain, 0.95, true);
  for (const auto& c : alt.components) {
    CHECK(c.mean_rr == doctest::Approx(inverse_transform(c.mu.mean)));
  }
}

TEST_CASE("cycle report refuses static chains and obeys the Jensen contract") {
  Chain st = short_chain(ModelKind::kStatic, 150, 63);
  CHECK_THROWS_AS(cycle_report(st), ConfigError);

  Chain dyn = short_chain(ModelKind::kDynamic, 200, 64);
  CycleReport rep = cycle_report(dyn);
  REQUIRE(static_cast<int>(rep.prob_state1.size()) == dyn.T);
  for (double v : rep.prob_state1) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // Steady-state summary averages per-draw values, not the formula at the
  // posterior means.
  double acc = 0.0;
  for (const auto& d : dyn.draws) acc += steady_state_prob(d.p, d.q);
  acc /= dyn.retained();
  CHECK(rep.steady.mean == doctest::Approx(acc).epsilon(1e-12));
  double at_means = steady_state_prob(rep.p.mean, rep.q.mean);
  CHECK(rep.steady.mean != at_means);
}

TEST_CASE("coefficient report flags exact zeros as insignificant") {
  Chain chain = short_chain(ModelKind::kStatic, 150, 65);
  for (auto& d : chain.draws) d.beta0(3) = 0.0;
  CoefficientReport rep = coefficient_report(chain);
  const CoefficientRow& row = rep.rows[3];
  CHECK_FALSE(row.summary.significant);
  CHECK(row.sign == ' ');
  CHECK(row.summary.flagged);  // constant trace
  for (const auto& r : rep.rows) {
    bool excludes = !(r.summary.hpd_lo <= 0.0 && 0.0 <= r.summary.hpd_hi);
    CHECK(r.summary.significant == excludes);
    if (r.summary.significant) {
      CHECK(r.sign == (r.summary.mean > 0 ? '+' : '-'));
    }
  }
  CHECK(rep.lambda2_mpm[0] > 0.0);
}

TEST_CASE("reports are pure functions of the chain") {
  Chain chain = short_chain(ModelKind::kDynamic, 150, 66);
  CHECK(mixture_report_csv(mixture_report(chain)) ==
        mixture_report_csv(mixture_report(chain)));
  CHECK(coefficient_report_json(coefficient_report(chain)) ==
        coefficient_report_json(coefficient_report(chain)));
  CHECK(cycle_series_tsv(cycle_report(chain)) ==
        cycle_series_tsv(cycle_report(chain)));
  CHECK(diagnostics_csv(chain) == diagnostics_csv(chain));
}

TEST_CASE("destandardized coefficients divide by the column scale") {
  Chain chain = short_chain(ModelKind::kStatic, 150, 67);
  CoefficientReport rep = coefficient_report(chain);
  // Covariate k (non-binary) scales by 1/sd.
  for (int k = 1; k <= chain.K; ++k) {
    const CoefficientRow& row = rep.rows[k];
    CHECK(row.destandardized_mean ==
          doctest::Approx(row.summary.mean / chain.scaling[k - 1].sd)
              .epsilon(1e-12));
  }
}
