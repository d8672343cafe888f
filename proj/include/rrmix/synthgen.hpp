#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rrmix/data.hpp"
#include "rrmix/rng.hpp"
#include "rrmix/transform.hpp"

namespace rrmix {

// Generating parameter set (cut-points include the fixed endpoints).
struct GenTruth {
  Eigen::VectorXd mu, sigma2;    // J each, mu ascending
  Eigen::VectorXd c;             // J+1: -inf, 0, ..., +inf
  Eigen::VectorXd beta0, beta1;  // K+1 each, intercept leading
  double p = 0.9, q = 0.9;

  int j() const { return static_cast<int>(mu.size()); }
  int k() const { return static_cast<int>(beta0.size()) - 1; }
};

// Everything the generator knows that a fit must rediscover.
struct GroundTruth {
  GenTruth params;
  std::vector<int> S;                  // T simulated states
  std::vector<int> zstar;              // n component indices
  std::vector<double> z;               // n latent scores
  std::vector<ColumnScaling> scaling;  // standardization the scores used
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
};

// One column's marginal generator. Derived kinds recompute interaction
// columns from already generated sources so they stay consistent.
struct CovSpec {
  enum class Kind { kBernoulli, kLogNormal, kTruncNormal, kProduct, kSquare };
  Kind kind = Kind::kBernoulli;
  double a = 0.5, b = 0.0;  // Bernoulli: mean; lognormal: log-median, log-sd;
                            // truncnormal: mean, sd
  double lo = 0.0, hi = 0.0;  // truncation bounds (truncnormal only)
  int src1 = -1, src2 = -1;   // source columns for derived kinds
};

// The 20-determinant preset matched to published descriptive statistics
// (binary means; continuous columns log-normal through median and quartiles).
std::vector<CovSpec> table1_preset();

// A reference dynamic-model truth with a given intercept gap between states;
// used by calibration fixtures.
GenTruth default_gen_truth(int J, int K, double intercept_gap = 1.5);

// Forward simulation of the full generative process. Scores regress on the
// standardized covariates (standardization computed in-sample with the same
// rule build_design applies), so the truth lives on the fitted scale.
std::pair<LoanDataset, GroundTruth> generate(const GenTruth& truth,
                                             const std::vector<int>& n_per_year,
                                             const std::vector<CovSpec>& cov,
                                             std::uint64_t seed,
                                             int first_year = 1987,
                                             double epsilon = kDefaultEpsilon);

// JSON sidecar round trip for the ground truth.
std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& json_text);

// Exact smoothed marginals Pr(S_t=1 | scores) by summing over all 2^T state
// paths; oracle for FFBS. Refuses T > 12.
Eigen::VectorXd enumerate_state_posterior(const Eigen::MatrixXd& year_logliks,
                                          double p, double q);

}  // namespace rrmix
