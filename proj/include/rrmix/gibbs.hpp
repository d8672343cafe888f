#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrmix/conditionals.hpp"
#include "rrmix/data.hpp"
#include "rrmix/ffbs.hpp"
#include "rrmix/priors.hpp"

namespace rrmix {

enum class ModelKind { kStatic, kDynamic };

struct FitConfig {
  ModelKind model = ModelKind::kDynamic;
  int draws = 100000;
  int burnin = 5000;
  int thin = 1;
  std::uint64_t seed = 1;
  int J = 4;
  double epsilon = kDefaultEpsilon;
  bool loan_weighted_transitions = false;
  int chains = 1;
  int threads = 1;
  bool store_latents = false;
  // Pins for the transition probabilities (used by the static/dynamic
  // consistency check); pinning disables relabeling.
  std::optional<double> fix_p, fix_q;
  // Upper bound for interior cut-points when a proper reference prior is in
  // force (Geweke harness); +inf keeps the diffuse prior of the model.
  double cutpoint_cap = std::numeric_limits<double>::infinity();

  void validate() const;
};

// Per-draw stored quantities: parameters always, latent traces on request.
struct ChainDraw {
  Eigen::VectorXd mu, sigma2;      // J each
  Eigen::VectorXd c_interior;      // J-2 interior cut-points
  Eigen::VectorXd beta0, beta1;    // K+1 each (static: beta1 zero)
  double lambda0_2 = 0, lambda1_2 = 0;
  double p = 0, q = 0;
  double loglik = 0;               // score log likelihood from the filter
  Eigen::VectorXd comp_weight;     // J, fraction of loans allocated per comp
  Eigen::VectorXd comp_mean_rr;    // J, mean clamped RR of allocated loans
  std::vector<std::uint8_t> S;     // T (dynamic only)
  Eigen::VectorXd z;               // n (only when store_latents)
  std::vector<int> zstar;          // n (only when store_latents)
};

struct Chain {
  FitConfig config;
  int n = 0, T = 0, K = 0, J = 0;
  std::vector<int> years;                    // calendar years
  std::vector<std::string> determinant_names;
  std::vector<bool> binary_mask;
  std::vector<ColumnScaling> scaling;
  std::vector<ChainDraw> draws;

  int retained() const { return static_cast<int>(draws.size()); }
};

// One full sweep over the eight conditional blocks. Static mode collapses
// the shrinkage, state and transition blocks to their single-state forms.
// Step 1 splits the RNG per loan so results are thread-count invariant.
void gibbs_step(ModelState& s, const DesignMatrix& d, const HyperParams& h,
                const FitConfig& cfg, std::uint64_t seed, std::uint64_t sweep);

// Full run: prior initialization, burn-in, thinned retention, relabeling.
Chain fit(const LoanDataset& ds, const FitConfig& cfg);
Chain fit(const DesignMatrix& d, const HyperParams& h, const FitConfig& cfg);

// Normalizes state labels so beta1 carries the higher dataset-average fitted
// score; involution, identity when already ordered.
ModelState relabel_states(const ModelState& s, const DesignMatrix& d);

}  // namespace rrmix
