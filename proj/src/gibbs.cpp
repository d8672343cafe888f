#include "rrmix/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPinEps = 1e-12;

// Stream labels for RNG splitting within a sweep.
constexpr std::uint64_t kStreamLoans = 1;
constexpr std::uint64_t kStreamBlocks = 2;
constexpr std::uint64_t kStreamInit = 3;

double pin_into_open_unit(double v) {
  return std::clamp(v, kPinEps, 1.0 - kPinEps);
}

// Boundary pins describe a degenerate chain whose state path is deterministic:
// p=0, q=1 absorbs into state 1; p=1, q=0 into state 0. Sampling through the
// filter with clamped probabilities would let a large likelihood imbalance
// overturn the pin, so these paths are forced outright.
int forced_state_of_pins(const FitConfig& cfg) {
  if (!cfg.fix_p) return -1;
  if (*cfg.fix_p == 0.0 && *cfg.fix_q == 1.0) return 1;
  if (*cfg.fix_p == 1.0 && *cfg.fix_q == 0.0) return 0;
  return -1;
}

// Per-year score log likelihoods under both coefficient vectors, via index
// lists so no rows are copied.
Eigen::MatrixXd year_score_logliks(const DesignMatrix& d,
                                   const Eigen::VectorXd& z,
                                   const Eigen::VectorXd& fitted0,
                                   const Eigen::VectorXd& fitted1) {
  constexpr double kLog2Pi = 1.8378770664093454836;
  Eigen::MatrixXd ll = Eigen::MatrixXd::Zero(d.t(), 2);
  for (int i = 0; i < d.n(); ++i) {
    int t = d.year_index[i];
    double r0 = z(i) - fitted0(i);
    double r1 = z(i) - fitted1(i);
    ll(t, 0) -= 0.5 * (kLog2Pi + r0 * r0);
    ll(t, 1) -= 0.5 * (kLog2Pi + r1 * r1);
  }
  return ll;
}

void step_indicators_and_scores(ModelState& s, const DesignMatrix& d,
                                const Eigen::VectorXd& fitted0,
                                const Eigen::VectorXd& fitted1,
                                std::uint64_t seed, std::uint64_t sweep,
                                int threads) {
  const int n = d.n();
  auto worker = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      Rng rng(seed, sweep, kStreamLoans, static_cast<std::uint64_t>(i));
      double a = s.S[d.year_index[i]] == 0 ? fitted0(i) : fitted1(i);
      Eigen::VectorXd w = mixture_weights(a, d.y(i), s.c, s.mu, s.sigma2);
      s.zstar[i] = draw_indicator(w, rng);
      s.z(i) = draw_latent_score(a, s.zstar[i], s.c, rng);
    }
  };
  if (threads <= 1 || n < 256) {
    worker(0, n);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(worker, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void FitConfig::validate() const {
  if (draws < 1) throw ConfigError("FitConfig: draws must be >= 1");
  if (burnin < 0) throw ConfigError("FitConfig: burnin must be >= 0");
  if (thin < 1) throw ConfigError("FitConfig: thin must be >= 1");
  if (J < 2) throw ConfigError("FitConfig: J must be >= 2");
  if (!(epsilon > 0 && epsilon < 0.5)) {
    throw ConfigError("FitConfig: epsilon must lie in (0, 0.5)");
  }
  if (chains < 1) throw ConfigError("FitConfig: chains must be >= 1");
  if (threads < 1) throw ConfigError("FitConfig: threads must be >= 1");
  if (fix_p.has_value() != fix_q.has_value()) {
    throw ConfigError("FitConfig: fix_p and fix_q must be set together");
  }
  if (fix_p && !(*fix_p >= 0 && *fix_p <= 1 && *fix_q >= 0 && *fix_q <= 1)) {
    throw ConfigError("FitConfig: pinned p, q must lie in [0,1]");
  }
}

void gibbs_step(ModelState& s, const DesignMatrix& d, const HyperParams& h,
                const FitConfig& cfg, std::uint64_t seed, std::uint64_t sweep) {
  const bool dynamic = cfg.model == ModelKind::kDynamic;
  Rng rng(seed, sweep, kStreamBlocks);

  try {
    // Step 1: mixture indicators and predictive scores, per loan.
    Eigen::VectorXd fitted0 = d.X * s.beta0;
    Eigen::VectorXd fitted1 = dynamic ? Eigen::VectorXd(d.X * s.beta1) : fitted0;
    step_indicators_and_scores(s, d, fitted0, fitted1, seed, sweep, cfg.threads);

    // Step 2: regression coefficients on the state partition.
    if (dynamic) {
      StatePartition part = partition_by_state(d.X, s.z, d.year_index, s.S);
      s.beta0 = draw_beta(part.X0, part.z0, s.tau0, h.intercept_var, rng);
      s.beta1 = draw_beta(part.X1, part.z1, s.tau1, h.intercept_var, rng);
    } else {
      s.beta0 = draw_beta(d.X, s.z, s.tau0, h.intercept_var, rng);
      s.beta1 = s.beta0;
    }

    // Step 3: LASSO hierarchy, tau then lambda^2, per state.
    for (int k = 0; k < h.K; ++k) {
      s.tau0(k) = 1.0 / draw_tau_inv2(s.beta0(k + 1), s.lambda0_2, rng);
    }
    s.lambda0_2 = draw_lambda2(s.tau0, h.r_bar, h.delta_bar, rng);
    if (dynamic) {
      for (int k = 0; k < h.K; ++k) {
        s.tau1(k) = 1.0 / draw_tau_inv2(s.beta1(k + 1), s.lambda1_2, rng);
      }
      s.lambda1_2 = draw_lambda2(s.tau1, h.r_bar, h.delta_bar, rng);
    } else {
      s.tau1 = s.tau0;
      s.lambda1_2 = s.lambda0_2;
    }

    // Step 4: interior cut-points. The ordered-uniform reference prior's
    // upper bound always applies; without it the conditional turns improper
    // whenever every component above some j is momentarily empty.
    s.c = draw_cutpoints(s.z, s.zstar, s.c, rng,
                         std::min(cfg.cutpoint_cap, h.cutpoint_ref_max));

    if (dynamic) {
      // Step 5: latent credit states via FFBS (or forced by boundary pins).
      int forced = forced_state_of_pins(cfg);
      if (forced >= 0) {
        std::fill(s.S.begin(), s.S.end(), forced);
      } else {
        Eigen::VectorXd f0 = d.X * s.beta0;
        Eigen::VectorXd f1 = d.X * s.beta1;
        Eigen::MatrixXd ll = year_score_logliks(d, s.z, f0, f1);
        FilterResult f = hamilton_filter(ll, s.p, s.q);
        s.S = backward_sample(f, s.p, s.q, rng);
      }

      // Step 6: transition probabilities (skipped when pinned).
      if (!cfg.fix_p) {
        if (cfg.loan_weighted_transitions) {
          std::vector<int> loans_per_year(d.t(), 0);
          for (int t : d.year_index) ++loans_per_year[t];
          std::tie(s.p, s.q) =
              draw_pq_loan_weighted(s.S, loans_per_year, h, rng);
        } else {
          std::tie(s.p, s.q) = draw_pq_stationary(s.S, h, rng);
        }
      }
    }

    // Step 7: mixture means.
    s.mu = draw_mu(d.y, s.zstar, s.sigma2, s.mu, h, rng);

    // Step 8: mixture variances.
    s.sigma2 = draw_sigma2(d.y, s.zstar, s.mu, h, rng);
  } catch (const std::exception& e) {
    throw NumericError("gibbs_step: sweep " + std::to_string(sweep) + ": " +
                       e.what());
  }
}

ModelState relabel_states(const ModelState& s, const DesignMatrix& d) {
  double m0 = (d.X * s.beta0).mean();
  double m1 = (d.X * s.beta1).mean();
  if (m1 >= m0) return s;
  ModelState out = s;
  out.beta0 = s.beta1;
  out.beta1 = s.beta0;
  out.tau0 = s.tau1;
  out.tau1 = s.tau0;
  out.lambda0_2 = s.lambda1_2;
  out.lambda1_2 = s.lambda0_2;
  out.p = s.q;
  out.q = s.p;
  for (auto& st : out.S) st = 1 - st;
  return out;
}

Chain fit(const DesignMatrix& d, const HyperParams& h, const FitConfig& cfg) {
  cfg.validate();
  h.validate();
  const bool dynamic = cfg.model == ModelKind::kDynamic;
  const bool pinned = cfg.fix_p.has_value();

  // Initialization is a prior draw, redrawn until the start is recoverable.
  // Two prior-typical starts strand the sampler in quasi-absorbing regions
  // burn-in cannot escape: (a) c_1 = 0 is pinned, so an |intercept| far from
  // the cut-point scale pushes every loan into one extreme component, and
  // (b) interior cut-points drawn high on their reference range leave the
  // upper components with exactly zero allocation probability (the chain then
  // fits a collapsed mixture). A third trap lives on the response side:
  // component means drawn far outside the observed response range (prior sd
  // is 10) hand their loans to a neighbor, and the resulting merged component
  // is a sticky local mode. Conditioning the prior draw on a sane region
  // removes those starts without touching the kernel.
  // The constrained blocks (coefficients, cut-points, response components)
  // are independent under the prior, so each is rejection-sampled on its own;
  // a joint accept/reject would need ~1/(p_beta * p_c * p_mu) tries.
  Rng init_rng(cfg.seed, 0, kStreamInit);
  ModelState s = sample_prior_state(h, d, init_rng);
  constexpr double kInitScoreBound = 1.5;
  constexpr double kInitCutBound = 5.0;
  const double y_lo = d.y.minCoeff() - 1.0;
  const double y_hi = d.y.maxCoeff() + 1.0;
  // Beyond the range bound, every response must start within reach of some
  // component mean: a start whose means miss a data cluster merges that
  // cluster into a neighbor component, and the ordered sequential mean update
  // cannot split it back apart.
  constexpr double kInitCoverBound = 2.0;
  auto mu_covers = [&](const Eigen::VectorXd& mu) {
    if (mu.minCoeff() < y_lo || mu.maxCoeff() > y_hi) return false;
    for (int i = 0; i < d.n(); ++i) {
      double best = std::abs(d.y(i) - mu(0));
      for (int j = 1; j < mu.size(); ++j)
        best = std::min(best, std::abs(d.y(i) - mu(j)));
      if (best > kInitCoverBound) return false;
    }
    return true;
  };
  bool ok_beta = false, ok_cut = false, ok_mu = false;
  for (int tries = 0; tries < 200000 && !(ok_beta && ok_cut && ok_mu);
       ++tries) {
    if (!ok_beta) {
      double f0 = std::abs((d.X * s.beta0).mean());
      double f1 = dynamic ? std::abs((d.X * s.beta1).mean()) : 0.0;
      ok_beta = f0 <= kInitScoreBound && f1 <= kInitScoreBound;
    }
    if (!ok_cut)
      ok_cut = h.J <= 2 || s.c.segment(2, h.J - 2).maxCoeff() <= kInitCutBound;
    if (!ok_mu) ok_mu = mu_covers(s.mu);
    if (ok_beta && ok_cut && ok_mu) break;
    ModelState t = sample_prior_state(h, d, init_rng);
    if (!ok_beta) {
      s.beta0 = t.beta0;
      s.beta1 = t.beta1;
      s.tau0 = t.tau0;
      s.tau1 = t.tau1;
      s.lambda0_2 = t.lambda0_2;
      s.lambda1_2 = t.lambda1_2;
    }
    if (!ok_cut) s.c = t.c;
    if (!ok_mu) {
      s.mu = t.mu;
      s.sigma2 = t.sigma2;
    }
  }
  if (!dynamic) {
    std::fill(s.S.begin(), s.S.end(), 0);
    s.beta1 = s.beta0;
    s.tau1 = s.tau0;
    s.lambda1_2 = s.lambda0_2;
  }
  if (pinned) {
    s.p = pin_into_open_unit(*cfg.fix_p);
    s.q = pin_into_open_unit(*cfg.fix_q);
    int forced = forced_state_of_pins(cfg);
    if (forced >= 0) std::fill(s.S.begin(), s.S.end(), forced);
  }
  // Mixing blocks from different prior draws (and the static / pinned fixups
  // above) leaves (z, zstar) stale; redraw the scores under the final
  // coefficients and re-derive the intervals before asserting invariants.
  for (int i = 0; i < d.n(); ++i) {
    const Eigen::VectorXd& b = s.S[d.year_index[i]] == 0 ? s.beta0 : s.beta1;
    s.z(i) = init_rng.normal(d.X.row(i).dot(b), 1.0);
    int j = 1;
    while (j < h.J && s.z(i) > s.c(j)) ++j;
    s.zstar[i] = j;
  }
  s.check_invariants();

  Chain chain;
  chain.config = cfg;
  chain.n = d.n();
  chain.T = d.t();
  chain.K = d.k();
  chain.J = h.J;
  chain.years = d.years;
  chain.determinant_names = d.determinant_names;
  chain.binary_mask = d.binary_mask;
  chain.scaling = d.scaling;
  chain.draws.reserve((cfg.draws + cfg.thin - 1) / cfg.thin);

  const int total = cfg.burnin + cfg.draws;
  for (int g = 0; g < total; ++g) {
    gibbs_step(s, d, h, cfg, cfg.seed, static_cast<std::uint64_t>(g));
    if (g < cfg.burnin) continue;
    int post = g - cfg.burnin;
    if (post % cfg.thin != 0) continue;

    if (dynamic && !pinned) s = relabel_states(s, d);

    ChainDraw dr;
    dr.mu = s.mu;
    dr.sigma2 = s.sigma2;
    dr.c_interior = s.c.segment(2, std::max(chain.J - 2, 0));
    dr.beta0 = s.beta0;
    dr.beta1 = s.beta1;
    dr.lambda0_2 = s.lambda0_2;
    dr.lambda1_2 = s.lambda1_2;
    dr.p = s.p;
    dr.q = s.q;

    dr.comp_weight = Eigen::VectorXd::Zero(chain.J);
    dr.comp_mean_rr = Eigen::VectorXd::Constant(
        chain.J, std::numeric_limits<double>::quiet_NaN());
    Eigen::VectorXd rr_sum = Eigen::VectorXd::Zero(chain.J);
    for (int i = 0; i < chain.n; ++i) {
      int j = s.zstar[i] - 1;
      dr.comp_weight(j) += 1.0;
      rr_sum(j) += inverse_transform(d.y(i));
    }
    for (int j = 0; j < chain.J; ++j) {
      if (dr.comp_weight(j) > 0) dr.comp_mean_rr(j) = rr_sum(j) / dr.comp_weight(j);
      dr.comp_weight(j) /= chain.n;
    }

    Eigen::VectorXd f0 = d.X * s.beta0;
    Eigen::VectorXd f1 = d.X * s.beta1;
    Eigen::MatrixXd ll = year_score_logliks(d, s.z, f0, f1);
    if (dynamic) {
      dr.loglik = hamilton_filter(ll, s.p, s.q).loglik;
      dr.S.assign(s.S.begin(), s.S.end());
    } else {
      dr.loglik = ll.col(0).sum();
    }
    if (cfg.store_latents) {
      dr.z = s.z;
      dr.zstar = s.zstar;
    }
    chain.draws.push_back(std::move(dr));
  }
  return chain;
}

Chain fit(const LoanDataset& ds, const FitConfig& cfg) {
  cfg.validate();
  DesignMatrix d = build_design(ds, /*standardize=*/true, cfg.epsilon);
  HyperParams h = default_hyperparams(cfg.J, d.k());
  return fit(d, h, cfg);
}

}  // namespace rrmix
