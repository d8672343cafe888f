#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "rrmix/data.hpp"
#include "rrmix/errors.hpp"
#include "rrmix/rng.hpp"

using namespace rrmix;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

LoanDataset small_dataset(int n, std::uint64_t seed = 5) {
  LoanDataset ds;
  ds.determinant_names.assign(kDeterminantNames.begin(), kDeterminantNames.end());
  ds.binary_mask.assign(kDeterminantBinary.begin(), kDeterminantBinary.end());
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    LoanRecord r;
    r.rr = rng.uniform();
    r.year = 1990 + static_cast<int>(rng.uniform() * 5);
    r.x.resize(kNumDeterminants);
    for (int c = 0; c < kNumDeterminants; ++c) {
      r.x[c] = kDeterminantBinary[c] ? (rng.uniform() < 0.4 ? 1.0 : 0.0)
                                     : rng.normal(1.0, 2.0);
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

std::string csv_header() {
  std::string h = "rr,year";
  for (const char* name : kDeterminantNames) {
    h += ',';
    h += name;
  }
  return h;
}

std::string zeros_row(double rr, int year) {
  std::string r = std::to_string(rr) + ',' + std::to_string(year);
  for (int c = 0; c < kNumDeterminants; ++c) r += ",0";
  return r;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

}  // namespace

TEST_CASE("dataset CSV round-trips exactly") {
  LoanDataset ds = small_dataset(40);
  auto p = temp_path("rrmix_roundtrip.csv");
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

TEST_CASE("loader accepts any header column order") {
  auto p = temp_path("rrmix_shuffled.csv");
  // year first, rr last, two determinants swapped.
  std::string h = "year";
  std::vector<std::string> names(kDeterminantNames.begin(), kDeterminantNames.end());
  std::swap(names[0], names[5]);
  for (const auto& n : names) h += "," + n;
  h += ",rr";
  std::string row = "1991";
  for (size_t c = 0; c < names.size(); ++c) row += ",0";
  row += ",0.7";
  write_text(p, h + "\n" + row + "\n");
  LoanDataset ds = load_dataset(p.string());
  REQUIRE(ds.n() == 1);
  CHECK(ds.records[0].rr == 0.7);
  CHECK(ds.records[0].year == 1991);
  std::filesystem::remove(p);
}

TEST_CASE("loader errors name the offending row and column") {
  auto p = temp_path("rrmix_bad.csv");

  write_text(p, csv_header() + "\n" + zeros_row(0.5, 1990) + "\n" +
                    zeros_row(1.5, 1990) + "\n");
  CHECK_THROWS_WITH_AS(load_dataset(p.string()),
                       doctest::Contains("row 2"), IngestError);

  std::string bad = zeros_row(0.5, 1990);
  bad.replace(bad.find(",0"), 2, ",oops");  // first determinant cell
  write_text(p, csv_header() + "\n" + bad + "\n");
  CHECK_THROWS_WITH_AS(load_dataset(p.string()),
                       doctest::Contains("LOANSIZE"), IngestError);

  write_text(p, "rr,year\n0.5,1990\n");
  CHECK_THROWS_WITH_AS(load_dataset(p.string()),
                       doctest::Contains("missing column"), IngestError);

  CHECK_THROWS_AS(load_dataset("/nonexistent/path.csv"), IngestError);
  std::filesystem::remove(p);
}

TEST_CASE("validate rejects non-binary values in binary columns") {
  LoanDataset ds = small_dataset(5);
  ds.records[3].x[1] = 0.5;  // LOANTYPE is binary
  CHECK_THROWS_WITH_AS(ds.validate(), doctest::Contains("row 4"), IngestError);
  CHECK_THROWS_WITH_AS(ds.validate(), doctest::Contains("LOANTYPE"), IngestError);
}

TEST_CASE("build_design standardizes continuous columns only") {
  LoanDataset ds = small_dataset(60);
  DesignMatrix d = build_design(ds);
  REQUIRE(d.n() == 60);
  REQUIRE(d.k() == kNumDeterminants);
  CHECK((d.X.col(0).array() == 1.0).all());
  for (int c = 0; c < kNumDeterminants; ++c) {
    Eigen::VectorXd col = d.X.col(c + 1);
    if (kDeterminantBinary[c]) {
      for (int i = 0; i < 60; ++i) {
        CHECK((col(i) == 0.0 || col(i) == 1.0));
      }
      CHECK(d.scaling[c].sd == 1.0);
    } else {
      CHECK(col.mean() == doctest::Approx(0.0).epsilon(1e-10));
      double sd = std::sqrt(col.squaredNorm() / 59.0);  // n-1 divisor
      CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero-variance continuous column is rejected by name") {
  LoanDataset ds = small_dataset(20);
  for (auto& r : ds.records) r.x[17] = 2.5;  // GDP constant
  CHECK_THROWS_WITH_AS(build_design(ds), doctest::Contains("GDP"), IngestError);
}

TEST_CASE("years map to contiguous slots including empty years") {
  LoanDataset ds = small_dataset(6);
  for (int i = 0; i < 6; ++i) ds.records[i].year = i < 3 ? 1990 : 1994;
  DesignMatrix d = build_design(ds);
  REQUIRE(d.t() == 5);
  CHECK(d.years.front() == 1990);
  CHECK(d.years.back() == 1994);
  CHECK(d.year_index[0] == 0);
  CHECK(d.year_index[5] == 4);
}

TEST_CASE("transformed responses match the probit of rr") {
  LoanDataset ds = small_dataset(10);
  ds.records[0].rr = 1.0;
  DesignMatrix d = build_design(ds);
  CHECK(d.y(0) == doctest::Approx(clamp_and_transform(1.0)).epsilon(1e-14));
  CHECK(d.y(1) ==
        doctest::Approx(clamp_and_transform(ds.records[1].rr)).epsilon(1e-14));
}

TEST_CASE("destandardize inverts the scaling on the fitted line") {
  LoanDataset ds = small_dataset(50);
  DesignMatrix d = build_design(ds);
  Rng rng(9);
  Eigen::VectorXd beta(kNumDeterminants + 1);
  for (int k = 0; k <= kNumDeterminants; ++k) beta(k) = rng.normal();
  Eigen::VectorXd raw = destandardize_coefficients(beta, d.scaling);
  // Fitted values on the raw covariates must equal those on the design.
  for (int i = 0; i < 5; ++i) {
    double on_design = beta(0);
    double on_raw = raw(0);
    for (int c = 0; c < kNumDeterminants; ++c) {
      on_design += beta(c + 1) * d.X(i, c + 1);
      on_raw += raw(c + 1) * ds.records[i].x[c];
    }
    CHECK(on_raw == doctest::Approx(on_design).epsilon(1e-10));
  }
}

TEST_CASE("build_design rejects an empty dataset") {
  LoanDataset ds;
  ds.determinant_names.assign(kDeterminantNames.begin(), kDeterminantNames.end());
  ds.binary_mask.assign(kDeterminantBinary.begin(), kDeterminantBinary.end());
  CHECK_THROWS_AS(build_design(ds), IngestError);
}
