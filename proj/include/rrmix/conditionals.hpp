#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "rrmix/priors.hpp"
#include "rrmix/rng.hpp"

namespace rrmix {

// Loans split by the credit state of their default year.
struct StatePartition {
  std::vector<int> idx0, idx1;
  Eigen::MatrixXd X0, X1;
  Eigen::VectorXd z0, z1;
};

StatePartition partition_by_state(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& z,
                                  const std::vector<int>& year_index,
                                  const std::vector<int>& S);

// Posterior allocation probabilities of one loan over the J mixture
// components: w_j proportional to Pr(c_{j-1} < z <= c_j | a) * phi(y; mu_j,
// sigma2_j), evaluated in log space and normalized.
Eigen::VectorXd mixture_weights(double a, double y_i, const Eigen::VectorXd& c,
                                const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& sigma2);

// Component index in 1..J with the given probabilities.
int draw_indicator(const Eigen::VectorXd& w, Rng& rng);

// z ~ N(a, 1) truncated to (c_{j-1}, c_j].
double draw_latent_score(double a, int j, const Eigen::VectorXd& c, Rng& rng);

// beta ~ N(Dd, D), D = (X'X + diag(prior precision))^{-1}, d = X'z, where the
// prior precision is (1/intercept_var, 1/tau2_1, ..., 1/tau2_K).
Eigen::VectorXd draw_beta(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& tau2, double intercept_var,
                          Rng& rng);

// 1/tau2_k ~ InverseGaussian(sqrt(lambda2 / beta_k^2), lambda2). A coefficient
// at exactly zero falls back to the prior exponential draw for tau2_k.
double draw_tau_inv2(double beta_k, double lambda2, Rng& rng);

// lambda2 ~ Gamma(shape K + r_bar, rate sum(tau2)/2 + delta_bar).
double draw_lambda2(const Eigen::VectorXd& tau2, double r_bar, double delta_bar,
                    Rng& rng);

// Interior cut-points redrawn uniformly on their data bounds, ascending index
// order, each conditioning on the freshest neighbors. upper_cap bounds every
// interior cut-point when a proper reference prior is in force (Geweke
// harness); inference passes +inf.
Eigen::VectorXd draw_cutpoints(const Eigen::VectorXd& z,
                               const std::vector<int>& zstar,
                               const Eigen::VectorXd& c, Rng& rng,
                               double upper_cap =
                                   std::numeric_limits<double>::infinity());

// Each mu_j from its conjugate truncated normal on (mu_{j-1}, mu_{j+1}).
Eigen::VectorXd draw_mu(const Eigen::VectorXd& y, const std::vector<int>& zstar,
                        const Eigen::VectorXd& sigma2,
                        const Eigen::VectorXd& mu, const HyperParams& h,
                        Rng& rng);

// sigma2_j ~ IG(a_j + n_j/2, b_j + residual SS / 2).
Eigen::VectorXd draw_sigma2(const Eigen::VectorXd& y,
                            const std::vector<int>& zstar,
                            const Eigen::VectorXd& mu, const HyperParams& h,
                            Rng& rng);

// Year-level transition counts (n00, n01, n10, n11) over the T-1 transitions.
std::array<int, 4> transition_counts(const std::vector<int>& S);

// Independent beta draws from the transition counts of S.
std::pair<double, double> draw_pq(const std::vector<int>& S,
                                  const HyperParams& h, Rng& rng);

// Literal appendix variant: each year-to-year transition counted once per
// loan defaulting in the destination year.
std::pair<double, double> draw_pq_loan_weighted(
    const std::vector<int>& S, const std::vector<int>& loans_per_year,
    const HyperParams& h, Rng& rng);

// Exact conditional draw of (p, q) including the stationary distribution of
// S_1: beta proposals from draw_pq accepted with the stationary weight. This
// is what the Gibbs engine uses; the plain beta draw omits the S_1 factor and
// leaves a detectable bias in the joint.
std::pair<double, double> draw_pq_stationary(const std::vector<int>& S,
                                             const HyperParams& h, Rng& rng);

}  // namespace rrmix
