#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rrmix/rng.hpp"

namespace rrmix {

// Loans regrouped by default year for the filter; years with no defaults
// keep an empty block (likelihood one, state still transitions).
struct YearBlocks {
  std::vector<Eigen::MatrixXd> X;  // T blocks, n_t x (K+1)
  std::vector<Eigen::VectorXd> z;  // T blocks

  int t() const { return static_cast<int>(z.size()); }
};

YearBlocks group_by_year(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                         const std::vector<int>& year_index, int T);

struct FilterResult {
  Eigen::MatrixXd predicted;  // T x 2, Pr(S_t | z_{1:t-1})
  Eigen::MatrixXd filtered;   // T x 2, Pr(S_t | z_{1:t})
  double loglik = 0.0;        // log marginal likelihood of the scores
};

// Sum of log phi(z_i - x_i' beta) over one year; 0 for an empty year.
double year_loglik(const Eigen::VectorXd& z_year, const Eigen::MatrixXd& X_year,
                   const Eigen::VectorXd& beta);

// Hamilton predict/update recursion started at the stationary distribution,
// run in log space so a year of hundreds of loans cannot underflow.
FilterResult hamilton_filter(const YearBlocks& blocks,
                             const Eigen::VectorXd& beta0,
                             const Eigen::VectorXd& beta1, double p, double q);

// Same recursion on precomputed per-year log likelihoods (column 0 for
// state 0, column 1 for state 1).
FilterResult hamilton_filter(const Eigen::MatrixXd& year_logliks, double p,
                             double q);

// Joint draw of the state path given the filter output.
std::vector<int> backward_sample(const FilterResult& f, double p, double q,
                                 Rng& rng);

// Smoothed marginals Pr(S_t = 1 | z_{1:T}) by the exact backward recursion.
Eigen::VectorXd smoothed_marginals(const FilterResult& f, double p, double q);

// Long-run probability of state 1: (1-p) / (2-p-q).
double steady_state_prob(double p, double q);

}  // namespace rrmix
