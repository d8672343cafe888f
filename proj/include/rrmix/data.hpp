#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "rrmix/transform.hpp"

namespace rrmix {

// The fixed determinant schema (names and binary flags), in column order.
inline constexpr int kNumDeterminants = 20;
extern const std::array<const char*, kNumDeterminants> kDeterminantNames;
extern const std::array<bool, kNumDeterminants> kDeterminantBinary;

struct LoanRecord {
  double rr = 0.0;               // recovery rate in [0,1]
  int year = 0;                  // calendar year of default
  std::vector<double> x;         // K determinant values
};

struct LoanDataset {
  std::vector<LoanRecord> records;
  std::vector<std::string> determinant_names;
  std::vector<bool> binary_mask;

  int n() const { return static_cast<int>(records.size()); }
  int k() const { return static_cast<int>(determinant_names.size()); }

  // Throws IngestError naming row and column on the first violation.
  void validate() const;
};

// Per-column standardization record; binary columns keep (0, 1).
struct ColumnScaling {
  double mean = 0.0;
  double sd = 1.0;
};

struct DesignMatrix {
  Eigen::VectorXd y;             // transformed responses
  Eigen::MatrixXd X;             // n x (K+1), leading intercept column
  std::vector<int> year_index;   // loan -> year slot in 0..T-1
  std::vector<int> years;        // calendar year per slot
  std::vector<ColumnScaling> scaling;  // K entries, one per determinant
  std::vector<std::string> determinant_names;
  std::vector<bool> binary_mask;

  int n() const { return static_cast<int>(y.size()); }
  int k() const { return static_cast<int>(X.cols()) - 1; }
  int t() const { return static_cast<int>(years.size()); }
};

// CSV ingestion against the fixed schema (header: rr, year, determinants).
LoanDataset load_dataset(const std::string& path);

// Writes the same schema; doubles are emitted round-trip exact.
void save_dataset(const LoanDataset& ds, const std::string& path);

// Transforms responses and assembles the regression design. Continuous
// determinants are z-scored when standardize is set; binary columns and the
// intercept pass through. Years are mapped to contiguous slots spanning
// min..max calendar year (empty years keep a slot with no loans).
DesignMatrix build_design(const LoanDataset& ds, bool standardize = true,
                          double epsilon = kDefaultEpsilon);

// Maps standardized-scale coefficients (intercept first) back to the raw
// covariate scale using the design's scaling record.
Eigen::VectorXd destandardize_coefficients(const Eigen::VectorXd& beta,
                                           const std::vector<ColumnScaling>& scaling);

}  // namespace rrmix
