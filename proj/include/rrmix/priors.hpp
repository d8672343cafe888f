#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rrmix/data.hpp"
#include "rrmix/rng.hpp"

namespace rrmix {

// Fixed prior constants. Inverse-gamma entries use shape a / scale b with
// density proportional to x^-(a+1) exp(-b/x), so the prior mean of each
// sigma2_j is b/(a-1).
struct HyperParams {
  Eigen::VectorXd mu_bar;       // J prior means for mu_j
  Eigen::VectorXd v_mu_bar;     // J prior variances for mu_j
  Eigen::VectorXd a_bar;        // J inverse-gamma shapes for sigma2_j
  Eigen::VectorXd b_bar;        // J inverse-gamma scales for sigma2_j
  double r_bar = 3.0;           // gamma shape for lambda^2
  double delta_bar = 1.0;       // gamma rate for lambda^2
  double u00 = 0.5, u01 = 0.5;  // beta constants for p
  double u10 = 0.5, u11 = 0.5;  // beta constants for q
  int J = 4;
  int K = 20;
  double sigma_eps2 = 1.0;      // latent-regression variance, fixed
  double intercept_var = 100.0; // diffuse prior variance for the intercept
  // Proper reference distribution for interior cut-points used only when
  // sampling from the prior (inference keeps the diffuse improper prior):
  // increasing order statistics of U(0, cutpoint_ref_max).
  double cutpoint_ref_max = 50.0;

  void validate() const;
};

HyperParams default_hyperparams(int J, int K);

// JSON round trip for config-file overrides.
HyperParams hyperparams_from_json(const std::string& json_text);
std::string hyperparams_to_json(const HyperParams& h);

// One complete configuration of parameters and latent variables.
struct ModelState {
  Eigen::VectorXd mu;           // J, ascending
  Eigen::VectorXd sigma2;       // J, positive
  Eigen::VectorXd c;            // J+1 cut-points, c[0]=-inf, c[1]=0, c[J]=+inf
  Eigen::VectorXd beta0, beta1; // K+1 each, intercept leading
  Eigen::VectorXd tau0, tau1;   // K local shrinkage variances
  double lambda0_2 = 1.0, lambda1_2 = 1.0;
  double p = 0.5, q = 0.5;
  std::vector<int> S;           // T states in {0,1}
  Eigen::VectorXd z;            // n latent predictive scores
  std::vector<int> zstar;       // n component indices in 1..J

  int j() const { return static_cast<int>(mu.size()); }
  int k() const { return static_cast<int>(tau0.size()); }

  // Throws DomainError on the first invariant violation.
  void check_invariants() const;
};

// Prior draw of every parameter block; z uses the supplied design (scores
// regress on x'beta_S) and zstar is the interval of z under the sampled
// cut-points. The intercept-only overload stands in when no design exists.
ModelState sample_prior_state(const HyperParams& h, const DesignMatrix& d,
                              Rng& rng);
ModelState sample_prior_state(const HyperParams& h, int n, int T, Rng& rng);

// Log joint prior density over all proper components (the improper cut-point
// prior contributes nothing). Returns -inf for states outside the support.
double log_prior_density(const ModelState& s, const HyperParams& h);

}  // namespace rrmix
