#include "rrmix/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rrmix/errors.hpp"

namespace rrmix {

const std::array<const char*, kNumDeterminants> kDeterminantNames = {
    "LOANSIZE",     "LOANTYPE",       "LOANTYPE_X_FIRMSIZE",
    "ALLASSETCOLL", "INVENTRECIVECOLL", "OTHERCOLL",
    "PREPACK",      "RESTRUCTURE",    "OTHERDEFAULT",
    "TIMETOEMERGE", "TIMETOEMERGE_SQ", "PREPACK_X_TIMETOEMERGE",
    "FIRMSIZE",     "FIRMPPE",        "FIRMCF",
    "FIRMLEV",      "EVERDEFAULTED",  "GDP",
    "INDDISTRESS",  "AIS"};

const std::array<bool, kNumDeterminants> kDeterminantBinary = {
    false, true,  false, true,  true,  true,  true,  false, true,  false,
    false, false, false, false, false, false, true,  false, true,  false};

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int row, const std::string& col) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IngestError("row " + std::to_string(row) + ", column " + col +
                      ": non-numeric value '" + s + "'");
  }
  return v;
}

void append_double(std::string& buf, double v) {
  char tmp[32];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  buf.append(tmp, ptr);
}

}  // namespace

void LoanDataset::validate() const {
  const int kk = k();
  for (int i = 0; i < n(); ++i) {
    const auto& r = records[i];
    const int row = i + 1;  // 1-based data row, matching the error contract
    if (!(r.rr >= 0.0 && r.rr <= 1.0)) {
      throw IngestError("row " + std::to_string(row) +
                        ", column rr: value outside [0,1]");
    }
    if (static_cast<int>(r.x.size()) != kk) {
      throw IngestError("row " + std::to_string(row) + ": expected " +
                        std::to_string(kk) + " determinants, got " +
                        std::to_string(r.x.size()));
    }
    for (int c = 0; c < kk; ++c) {
      if (binary_mask[c] && r.x[c] != 0.0 && r.x[c] != 1.0) {
        throw IngestError("row " + std::to_string(row) + ", column " +
                          determinant_names[c] + ": binary column with value " +
                          std::to_string(r.x[c]));
      }
      if (!std::isfinite(r.x[c])) {
        throw IngestError("row " + std::to_string(row) + ", column " +
                          determinant_names[c] + ": non-finite value");
      }
    }
  }
}

LoanDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty file: " + path);
  auto header = split_csv_line(line);

  // Column positions: rr and year required, then each determinant by name.
  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IngestError("missing column: " + name);
    return static_cast<int>(it - header.begin());
  };
  int rr_col = find_col("rr");
  int year_col = find_col("year");
  std::vector<int> det_cols(kNumDeterminants);
  for (int c = 0; c < kNumDeterminants; ++c) {
    det_cols[c] = find_col(kDeterminantNames[c]);
  }

  LoanDataset ds;
  ds.determinant_names.assign(kDeterminantNames.begin(), kDeterminantNames.end());
  ds.binary_mask.assign(kDeterminantBinary.begin(), kDeterminantBinary.end());

  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IngestError("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    }
    LoanRecord rec;
    rec.rr = parse_double(cells[rr_col], row, "rr");
    if (!(rec.rr >= 0.0 && rec.rr <= 1.0)) {
      throw IngestError("row " + std::to_string(row) +
                        ", column rr: value outside [0,1]");
    }
    rec.year = static_cast<int>(parse_double(cells[year_col], row, "year"));
    rec.x.resize(kNumDeterminants);
    for (int c = 0; c < kNumDeterminants; ++c) {
      rec.x[c] = parse_double(cells[det_cols[c]], row, kDeterminantNames[c]);
    }
    ds.records.push_back(std::move(rec));
  }
  ds.validate();
  return ds;
}

void save_dataset(const LoanDataset& ds, const std::string& path) {
  std::string buf = "rr,year";
  for (const auto& name : ds.determinant_names) {
    buf += ',';
    buf += name;
  }
  buf += '\n';
  for (const auto& r : ds.records) {
    append_double(buf, r.rr);
    buf += ',';
    buf += std::to_string(r.year);
    for (double v : r.x) {
      buf += ',';
      append_double(buf, v);
    }
    buf += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write dataset file: " + path);
  out << buf;
}

DesignMatrix build_design(const LoanDataset& ds, bool standardize,
                          double epsilon) {
  if (ds.n() < 1) throw IngestError("build_design: empty dataset");
  ds.validate();

  const int n = ds.n();
  const int K = ds.k();
  DesignMatrix d;
  d.determinant_names = ds.determinant_names;
  d.binary_mask = ds.binary_mask;

  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.y(i) = clamp_and_transform(ds.records[i].rr, epsilon);
  }

  int ymin = ds.records[0].year, ymax = ds.records[0].year;
  for (const auto& r : ds.records) {
    ymin = std::min(ymin, r.year);
    ymax = std::max(ymax, r.year);
  }
  for (int y = ymin; y <= ymax; ++y) d.years.push_back(y);
  d.year_index.resize(n);
  for (int i = 0; i < n; ++i) d.year_index[i] = ds.records[i].year - ymin;

  d.X.resize(n, K + 1);
  d.X.col(0).setOnes();
  d.scaling.resize(K);
  for (int c = 0; c < K; ++c) {
    Eigen::VectorXd col(n);
    for (int i = 0; i < n; ++i) col(i) = ds.records[i].x[c];
    if (standardize && !ds.binary_mask[c]) {
      double mean = col.mean();
      double sd = std::sqrt((col.array() - mean).square().sum() /
                            std::max(n - 1, 1));
      if (!(sd > 0.0)) {
        throw IngestError("build_design: zero-variance continuous column " +
                          ds.determinant_names[c]);
      }
      d.scaling[c] = {mean, sd};
      d.X.col(c + 1) = (col.array() - mean) / sd;
    } else {
      d.scaling[c] = {0.0, 1.0};
      d.X.col(c + 1) = col;
    }
  }
  return d;
}

Eigen::VectorXd destandardize_coefficients(
    const Eigen::VectorXd& beta, const std::vector<ColumnScaling>& scaling) {
  Eigen::VectorXd raw = beta;
  for (int c = 0; c < static_cast<int>(scaling.size()); ++c) {
    raw(c + 1) = beta(c + 1) / scaling[c].sd;
    raw(0) -= beta(c + 1) * scaling[c].mean / scaling[c].sd;
  }
  return raw;
}

}  // namespace rrmix
