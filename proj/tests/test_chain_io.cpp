#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rrmix/chain_io.hpp"
#include "rrmix/errors.hpp"
#include "rrmix/synthgen.hpp"

using namespace rrmix;

namespace {

Chain make_chain(ModelKind mode, bool latents = false,
                 bool pinned = false, std::uint64_t seed = 71) {
  GenTruth truth = default_gen_truth(4, kNumDeterminants);
  std::vector<int> per(4, 15);
  auto [ds, gt] = generate(truth, per, table1_preset(), seed);
  FitConfig cfg;
  cfg.model = mode;
  cfg.draws = 12;
  cfg.burnin = 3;
  cfg.thin = 2;
  cfg.seed = seed;
  cfg.store_latents = latents;
  if (pinned) {
    cfg.fix_p = 0.8;
    cfg.fix_q = 0.6;
  }
  return fit(ds, cfg);
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void check_roundtrip(const Chain& a, const Chain& b) {
  CHECK(b.n == a.n);
  CHECK(b.T == a.T);
  CHECK(b.K == a.K);
  CHECK(b.J == a.J);
  CHECK(b.years == a.years);
  CHECK(b.determinant_names == a.determinant_names);
  CHECK(b.binary_mask == a.binary_mask);
  REQUIRE(b.scaling.size() == a.scaling.size());
  for (size_t k = 0; k < a.scaling.size(); ++k) {
    CHECK(b.scaling[k].mean == a.scaling[k].mean);
    CHECK(b.scaling[k].sd == a.scaling[k].sd);
  }
  CHECK(b.config.model == a.config.model);
  CHECK(b.config.seed == a.config.seed);
  CHECK(b.config.draws == a.config.draws);
  CHECK(b.config.burnin == a.config.burnin);
  CHECK(b.config.thin == a.config.thin);
  CHECK(b.config.epsilon == a.config.epsilon);
  CHECK(b.config.store_latents == a.config.store_latents);
  CHECK(b.config.fix_p.has_value() == a.config.fix_p.has_value());
  if (a.config.fix_p) {
    CHECK(*b.config.fix_p == *a.config.fix_p);
    CHECK(*b.config.fix_q == *a.config.fix_q);
  }
  REQUIRE(b.retained() == a.retained());
  for (int g = 0; g < a.retained(); ++g) {
    const ChainDraw& x = a.draws[g];
    const ChainDraw& y = b.draws[g];
    CHECK(x.mu == y.mu);
    CHECK(x.sigma2 == y.sigma2);
    CHECK(x.c_interior == y.c_interior);
    CHECK(x.beta0 == y.beta0);
    CHECK(x.beta1 == y.beta1);
    CHECK(x.lambda0_2 == y.lambda0_2);
    CHECK(x.lambda1_2 == y.lambda1_2);
    CHECK(x.p == y.p);
    CHECK(x.q == y.q);
    CHECK(x.loglik == y.loglik);
    CHECK(x.comp_weight == y.comp_weight);
    // comp_mean_rr may hold NaN for unoccupied components; compare bitwise.
    REQUIRE(x.comp_mean_rr.size() == y.comp_mean_rr.size());
    for (int j = 0; j < x.comp_mean_rr.size(); ++j) {
      CHECK(std::memcmp(&x.comp_mean_rr(j), &y.comp_mean_rr(j),
                        sizeof(double)) == 0);
    }
    CHECK(x.S == y.S);
    CHECK(x.z == y.z);
    CHECK(x.zstar == y.zstar);
  }
}

}  // namespace

TEST_CASE("dynamic chain with latents round-trips exactly") {
  Chain a = make_chain(ModelKind::kDynamic, /*latents=*/true);
  std::string p = temp_file("rrmix_chain_dyn.bin");
  save_chain(a, p);
  Chain b = load_chain(p);
  check_roundtrip(a, b);
  std::filesystem::remove(p);
}

TEST_CASE("static pinned-free chain round-trips exactly") {
  Chain a = make_chain(ModelKind::kStatic);
  std::string p = temp_file("rrmix_chain_static.bin");
  save_chain(a, p);
  Chain b = load_chain(p);
  check_roundtrip(a, b);
  CHECK(b.draws[0].S.empty());
  std::filesystem::remove(p);
}

TEST_CASE("pinned transition probabilities survive the file") {
  Chain a = make_chain(ModelKind::kDynamic, false, /*pinned=*/true, 73);
  std::string p = temp_file("rrmix_chain_pin.bin");
  save_chain(a, p);
  Chain b = load_chain(p);
  check_roundtrip(a, b);
  CHECK(*b.config.fix_p == 0.8);
  CHECK(*b.config.fix_q == 0.6);
  std::filesystem::remove(p);
}

TEST_CASE("bad magic and truncation raise IngestError") {
  std::string p = temp_file("rrmix_chain_bad.bin");
  {
    std::ofstream os(p, std::ios::binary);
    os << "NOTCHAIN more garbage";
  }
  CHECK_THROWS_AS(load_chain(p), IngestError);

  Chain a = make_chain(ModelKind::kDynamic, false, false, 79);
  save_chain(a, p);
  auto size = std::filesystem::file_size(p);
  std::filesystem::resize_file(p, size / 2);
  CHECK_THROWS_AS(load_chain(p), IngestError);
  std::filesystem::remove(p);
  CHECK_THROWS_AS(load_chain(p), IngestError);  // missing file
}

TEST_CASE("CSV export has one header and one row per draw") {
  Chain a = make_chain(ModelKind::kDynamic, false, false, 83);
  std::string csv = chain_to_csv(a);
  std::istringstream is(csv);
  std::string header;
  REQUIRE(std::getline(is, header));
  CHECK(header.rfind("draw,mu_1,", 0) == 0);
  CHECK(header.find(",p,q,") != std::string::npos);
  CHECK(header.find(",S_1987") != std::string::npos);
  int rows = 0;
  std::string line;
  size_t cols = static_cast<size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  while (std::getline(is, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') + 1 ==
          static_cast<long>(cols));
    ++rows;
  }
  CHECK(rows == a.retained());

  // Static chains drop the state-dependent columns.
  Chain st = make_chain(ModelKind::kStatic, false, false, 83);
  std::string csv2 = chain_to_csv(st);
  std::istringstream is2(csv2);
  std::string h2;
  REQUIRE(std::getline(is2, h2));
  CHECK(h2.find("beta1_") == std::string::npos);
  CHECK(h2.find(",S_") == std::string::npos);
}

TEST_CASE("run manifest carries the resolved configuration") {
  Chain a = make_chain(ModelKind::kDynamic, false, true, 89);
  std::string text = run_manifest_json(a, 12.5, "data.csv", "chain.bin");
  nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j["config"]["model"] == "dynamic");
  CHECK(j["config"]["draws"] == 12);
  CHECK(j["config"]["burnin"] == 3);
  CHECK(j["config"]["thin"] == 2);
  CHECK(j["config"]["seed"] == 89);
  CHECK(j["config"]["fix_p"] == 0.8);
  CHECK(j["dimensions"]["n"] == a.n);
  CHECK(j["dimensions"]["T"] == 4);
  CHECK(j["retained_draws"] == a.retained());
  CHECK(j["wall_seconds"] == 12.5);
  CHECK(j["dataset"] == "data.csv");
  CHECK(j["chain_file"] == "chain.bin");
  CHECK(j["invariants_checked"] == true);
}

TEST_CASE("default configuration serializes its documented defaults") {
  Chain a = make_chain(ModelKind::kDynamic, false, false, 97);
  FitConfig defaults;
  CHECK(defaults.draws == 100000);
  CHECK(defaults.burnin == 5000);
  CHECK(defaults.thin == 1);
  nlohmann::json j = nlohmann::json::parse(
      run_manifest_json(a, 0.0, "d.csv", "c.bin"));
  CHECK(j["config"].contains("epsilon"));
  CHECK_FALSE(j["config"].contains("fix_p"));
  CHECK_FALSE(j["config"].contains("cutpoint_cap"));
}
