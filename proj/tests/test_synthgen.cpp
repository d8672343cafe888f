#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "rrmix/data.hpp"
#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"
#include "rrmix/synthgen.hpp"

using namespace rrmix;

namespace {
std::vector<int> even_years(int n, int T) {
  std::vector<int> per(T, n / T);
  for (int t = 0; t < n % T; ++t) ++per[t];
  return per;
}
}  // namespace

TEST_CASE("generated data round-trips through write and load loss-free") {
  GenTruth truth = default_gen_truth(4, kNumDeterminants);
  auto [ds, gt] = generate(truth, even_years(300, 5), table1_preset(), 7);
  auto p = std::filesystem::temp_directory_path() / "rrmix_synth.csv";
  save_dataset(ds, p.string());
  LoanDataset back = load_dataset(p.string());
  REQUIRE(back.n() == ds.n());
  for (int i = 0; i < ds.n(); ++i) {
    CHECK(back.records[i].rr == ds.records[i].rr);
    CHECK(back.records[i].year == ds.records[i].year);
    for (int c = 0; c < kNumDeterminants; ++c) {
      CHECK(back.records[i].x[c] == ds.records[i].x[c]);
    }
  }
  std::filesystem::remove(p);
}

TEST_CASE("binary covariate means match the preset at full sample size") {
  GenTruth truth = default_gen_truth(4, kNumDeterminants);
  auto [ds, gt] = generate(truth, even_years(1611, 29), table1_preset(), 11);
  double loantype = 0.0;
  for (const auto& r : ds.records) loantype += r.x[1];
  loantype /= ds.n();
  CHECK(loantype > 0.45);
  CHECK(loantype < 0.51);
}

TEST_CASE("interaction columns are consistent with their sources") {
  GenTruth truth = default_gen_truth(4, kNumDeterminants);
  auto [ds, gt] = generate(truth, even_years(400, 8), table1_preset(), 13);
  for (const auto& r : ds.records) {
    CHECK(r.x[2] == r.x[1] * r.x[12]);   // LOANTYPE_X_FIRMSIZE
    CHECK(r.x[10] == r.x[9] * r.x[9]);   // TIMETOEMERGE_SQ
    CHECK(r.x[11] == r.x[6] * r.x[9]);   // PREPACK_X_TIMETOEMERGE
  }
}

TEST_CASE("component frequencies match the cut-point normal probabilities") {
  // With beta = 0 in both states, z ~ N(0,1) and the allocation follows
  // the exact interval probabilities under Phi.
  GenTruth truth = default_gen_truth(4, 3);
  truth.beta0.setZero();
  truth.beta1.setZero();
  std::vector<CovSpec> cov(3);
  cov[0].kind = CovSpec::Kind::kBernoulli;
  cov[0].a = 0.4;
  cov[1].kind = CovSpec::Kind::kTruncNormal;
  cov[1].a = 0.0;
  cov[1].b = 1.0;
  cov[1].lo = -5.0;
  cov[1].hi = 5.0;
  cov[2] = cov[1];
  const int n = 20000;
  auto [ds, gt] = generate(truth, even_years(n, 4), cov, 17);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(4);
  for (int zs : gt.zstar) counts(zs - 1) += 1;
  for (int j = 0; j < 4; ++j) {
    double lo = std::isinf(truth.c(j)) ? 0.0 : norm_cdf(truth.c(j));
    double hi = std::isinf(truth.c(j + 1)) ? 1.0 : norm_cdf(truth.c(j + 1));
    double prob = hi - lo;
    double sd = std::sqrt(n * prob * (1 - prob));
    CHECK(std::abs(counts(j) - n * prob) < 3.0 * sd + 1.0);
  }
}

TEST_CASE("rr matches the probit inverse of the drawn response") {
  GenTruth truth = default_gen_truth(3, 2);
  std::vector<CovSpec> cov(2);
  for (auto& c : cov) {
    c.kind = CovSpec::Kind::kTruncNormal;
    c.a = 0.0;
    c.b = 1.0;
    c.lo = -5.0;
    c.hi = 5.0;
  }
  auto [ds, gt] = generate(truth, even_years(500, 3), cov, 19);
  // Boundary values survive the round trip through the transform.
  for (const auto& r : ds.records) {
    CHECK(r.rr >= 0.0);
    CHECK(r.rr <= 1.0);
    double y = clamp_and_transform(r.rr);
    CHECK(std::isfinite(y));
  }
}

TEST_CASE("degenerate p=q=1 keeps the state constant") {
  GenTruth truth = default_gen_truth(3, 2);
  truth.p = 1.0;
  truth.q = 1.0;
  std::vector<CovSpec> cov(2);
  for (auto& c : cov) {
    c.kind = CovSpec::Kind::kBernoulli;
    c.a = 0.5;
  }
  auto [ds, gt] = generate(truth, even_years(60, 12), cov, 23);
  for (int t = 1; t < 12; ++t) CHECK(gt.S[t] == gt.S[0]);
}

TEST_CASE("same seed reproduces the dataset exactly") {
  GenTruth truth = default_gen_truth(4, kNumDeterminants);
  auto [a, gta] = generate(truth, even_years(200, 6), table1_preset(), 31);
  auto [b, gtb] = generate(truth, even_years(200, 6), table1_preset(), 31);
  REQUIRE(a.n() == b.n());
  for (int i = 0; i < a.n(); ++i) {
    CHECK(a.records[i].rr == b.records[i].rr);
    for (int c = 0; c < kNumDeterminants; ++c) {
      CHECK(a.records[i].x[c] == b.records[i].x[c]);
    }
  }
  CHECK(gta.S == gtb.S);
}

TEST_CASE("ground truth round-trips through JSON") {
  GenTruth truth = default_gen_truth(4, 5);
  std::vector<CovSpec> cov(5);
  for (auto& c : cov) {
    c.kind = CovSpec::Kind::kBernoulli;
    c.a = 0.3;
  }
  auto [ds, gt] = generate(truth, even_years(50, 4), cov, 37);
  GroundTruth back = ground_truth_from_json(ground_truth_to_json(gt));
  CHECK(back.S == gt.S);
  CHECK(back.zstar == gt.zstar);
  CHECK(back.params.mu.isApprox(gt.params.mu));
  CHECK(back.params.c(0) == gt.params.c(0));  // -inf survives
  CHECK(back.params.p == gt.params.p);
  CHECK(back.seed == gt.seed);
  CHECK_THROWS_AS(ground_truth_from_json("{"), IngestError);
}

TEST_CASE("invalid generator configurations are rejected") {
  GenTruth truth = default_gen_truth(3, 2);
  std::vector<CovSpec> cov(2);
  for (auto& c : cov) {
    c.kind = CovSpec::Kind::kBernoulli;
    c.a = 0.5;
  }
  CHECK_THROWS_AS(generate(truth, {}, cov, 1), ConfigError);
  CHECK_THROWS_AS(generate(truth, {0, 0}, cov, 1), ConfigError);
  CHECK_THROWS_AS(generate(truth, {5}, std::vector<CovSpec>(3), 1), ConfigError);
  cov[1].a = 1.5;
  CHECK_THROWS_AS(generate(truth, {5}, cov, 1), ConfigError);
  cov[1].a = 0.5;
  truth.p = 1.2;
  CHECK_THROWS_AS(generate(truth, {5}, cov, 1), ConfigError);
}
