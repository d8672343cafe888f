#include "rrmix/conditionals.hpp"

#include <cmath>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StatePartition partition_by_state(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& z,
                                  const std::vector<int>& year_index,
                                  const std::vector<int>& S) {
  StatePartition part;
  const int n = static_cast<int>(z.size());
  for (int i = 0; i < n; ++i) {
    (S[year_index[i]] == 0 ? part.idx0 : part.idx1).push_back(i);
  }
  auto gather = [&](const std::vector<int>& idx, Eigen::MatrixXd& Xs,
                    Eigen::VectorXd& zs) {
    Xs.resize(static_cast<int>(idx.size()), X.cols());
    zs.resize(static_cast<int>(idx.size()));
    for (int r = 0; r < static_cast<int>(idx.size()); ++r) {
      Xs.row(r) = X.row(idx[r]);
      zs(r) = z(idx[r]);
    }
  };
  gather(part.idx0, part.X0, part.z0);
  gather(part.idx1, part.X1, part.z1);
  return part;
}

Eigen::VectorXd mixture_weights(double a, double y_i, const Eigen::VectorXd& c,
                                const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& sigma2) {
  const int J = static_cast<int>(mu.size());
  if (!(sigma2.array() > 0).all()) {
    throw DomainError("mixture_weights: non-positive sigma2");
  }
  Eigen::VectorXd logw(J);
  for (int j = 0; j < J; ++j) {
    // Pr(c_j < z <= c_{j+1}) for z ~ N(a, 1), as a log interval mass.
    double lo = (c(j) == -kInf) ? -kInf : c(j) - a;
    double hi = (c(j + 1) == kInf) ? kInf : c(j + 1) - a;
    logw(j) = log_norm_interval(lo, hi) + norm_logpdf(y_i, mu(j), sigma2(j));
  }
  double m = logw.maxCoeff();
  if (!std::isfinite(m)) {
    throw NumericError("mixture_weights: all weights vanished (a=" +
                       std::to_string(a) + ", y=" + std::to_string(y_i) + ")");
  }
  Eigen::VectorXd w = (logw.array() - m).exp();
  w /= w.sum();
  return w;
}

int draw_indicator(const Eigen::VectorXd& w, Rng& rng) {
  return rng.categorical(w.data(), static_cast<int>(w.size())) + 1;
}

double draw_latent_score(double a, int j, const Eigen::VectorXd& c, Rng& rng) {
  return rng.truncated_normal(a, 1.0, c(j - 1), c(j));
}

Eigen::VectorXd draw_beta(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& tau2, double intercept_var,
                          Rng& rng) {
  const int K = static_cast<int>(tau2.size());
  if (X.cols() != K + 1) {
    throw DomainError("draw_beta: X must have K+1 columns");
  }
  if (!(tau2.array() > 0).all() || !(intercept_var > 0)) {
    throw DomainError("draw_beta: prior variances must be positive");
  }
  Eigen::MatrixXd A = X.transpose() * X;
  A(0, 0) += 1.0 / intercept_var;
  for (int k = 0; k < K; ++k) A(k + 1, k + 1) += 1.0 / tau2(k);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("draw_beta: posterior precision not positive definite");
  }
  Eigen::VectorXd mean = llt.solve(X.transpose() * z);
  Eigen::VectorXd eta(K + 1);
  for (int k = 0; k <= K; ++k) eta(k) = rng.normal();
  // beta = mean + L^{-T} eta gives covariance A^{-1}.
  return mean + llt.matrixU().solve(eta);
}

double draw_tau_inv2(double beta_k, double lambda2, Rng& rng) {
  if (!(lambda2 > 0)) throw DomainError("draw_tau_inv2: lambda2 must be positive");
  if (beta_k == 0.0) {
    // IG mean diverges; fall back to the prior for tau2 itself.
    return 1.0 / rng.exponential(lambda2 / 2.0);
  }
  double mean = std::sqrt(lambda2 / (beta_k * beta_k));
  return rng.inverse_gaussian(mean, lambda2);
}

double draw_lambda2(const Eigen::VectorXd& tau2, double r_bar, double delta_bar,
                    Rng& rng) {
  if (!(tau2.array() > 0).all()) {
    throw DomainError("draw_lambda2: non-positive tau2");
  }
  double shape = static_cast<double>(tau2.size()) + r_bar;
  double rate = 0.5 * tau2.sum() + delta_bar;
  return rng.gamma(shape, rate);
}

Eigen::VectorXd draw_cutpoints(const Eigen::VectorXd& z,
                               const std::vector<int>& zstar,
                               const Eigen::VectorXd& c, Rng& rng,
                               double upper_cap) {
  const int J = static_cast<int>(c.size()) - 1;
  Eigen::VectorXd out = c;
  const int n = static_cast<int>(z.size());
  // Per-component score extrema in one pass.
  std::vector<double> zmax(J + 1, -kInf), zmin(J + 2, kInf);
  for (int i = 0; i < n; ++i) {
    zmax[zstar[i]] = std::max(zmax[zstar[i]], z(i));
    zmin[zstar[i]] = std::min(zmin[zstar[i]], z(i));
  }
  for (int j = 2; j <= J - 1; ++j) {
    double lo = std::max(out(j - 1), zmax[j]);
    double hi = std::min({out(j + 1), zmin[j + 1], upper_cap});
    if (!(lo < hi)) {
      throw DomainError("draw_cutpoints: empty support for c_" + std::to_string(j));
    }
    out(j) = rng.uniform(lo, hi);
  }
  return out;
}

Eigen::VectorXd draw_mu(const Eigen::VectorXd& y, const std::vector<int>& zstar,
                        const Eigen::VectorXd& sigma2,
                        const Eigen::VectorXd& mu, const HyperParams& h,
                        Rng& rng) {
  const int J = static_cast<int>(mu.size());
  if (!(sigma2.array() > 0).all()) throw DomainError("draw_mu: non-positive sigma2");
  Eigen::VectorXd nj = Eigen::VectorXd::Zero(J);
  Eigen::VectorXd sumy = Eigen::VectorXd::Zero(J);
  for (int i = 0; i < y.size(); ++i) {
    nj(zstar[i] - 1) += 1.0;
    sumy(zstar[i] - 1) += y(i);
  }
  Eigen::VectorXd out = mu;
  for (int j = 0; j < J; ++j) {
    double prec = nj(j) / sigma2(j) + 1.0 / h.v_mu_bar(j);
    double num = sumy(j) / sigma2(j) + h.mu_bar(j) / h.v_mu_bar(j);
    double lo = (j == 0) ? -kInf : out(j - 1);
    double hi = (j == J - 1) ? kInf : out(j + 1);
    out(j) = rng.truncated_normal(num / prec, std::sqrt(1.0 / prec), lo, hi);
  }
  return out;
}

Eigen::VectorXd draw_sigma2(const Eigen::VectorXd& y,
                            const std::vector<int>& zstar,
                            const Eigen::VectorXd& mu, const HyperParams& h,
                            Rng& rng) {
  const int J = static_cast<int>(mu.size());
  Eigen::VectorXd nj = Eigen::VectorXd::Zero(J);
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(J);
  for (int i = 0; i < y.size(); ++i) {
    int j = zstar[i] - 1;
    double r = y(i) - mu(j);
    nj(j) += 1.0;
    ss(j) += r * r;
  }
  Eigen::VectorXd out(J);
  for (int j = 0; j < J; ++j) {
    out(j) = rng.inverse_gamma(h.a_bar(j) + 0.5 * nj(j), h.b_bar(j) + 0.5 * ss(j));
  }
  return out;
}

std::array<int, 4> transition_counts(const std::vector<int>& S) {
  std::array<int, 4> n{0, 0, 0, 0};  // n00, n01, n10, n11
  for (size_t t = 1; t < S.size(); ++t) {
    if (S[t - 1] == 0) {
      ++(S[t] == 0 ? n[0] : n[1]);
    } else {
      ++(S[t] == 0 ? n[2] : n[3]);
    }
  }
  return n;
}

std::pair<double, double> draw_pq(const std::vector<int>& S,
                                  const HyperParams& h, Rng& rng) {
  if (S.size() < 2) throw DomainError("draw_pq: need at least 2 years");
  auto n = transition_counts(S);
  double p = rng.beta(h.u00 + n[0], h.u01 + n[1]);
  double q = rng.beta(h.u11 + n[3], h.u10 + n[2]);
  return {p, q};
}

std::pair<double, double> draw_pq_loan_weighted(
    const std::vector<int>& S, const std::vector<int>& loans_per_year,
    const HyperParams& h, Rng& rng) {
  if (S.size() < 2) throw DomainError("draw_pq_loan_weighted: need at least 2 years");
  if (loans_per_year.size() != S.size()) {
    throw DomainError("draw_pq_loan_weighted: loans_per_year length mismatch");
  }
  std::array<int, 4> n{0, 0, 0, 0};
  for (size_t t = 1; t < S.size(); ++t) {
    int w = loans_per_year[t];
    if (S[t - 1] == 0) {
      (S[t] == 0 ? n[0] : n[1]) += w;
    } else {
      (S[t] == 0 ? n[2] : n[3]) += w;
    }
  }
  double p = rng.beta(h.u00 + n[0], h.u01 + n[1]);
  double q = rng.beta(h.u11 + n[3], h.u10 + n[2]);
  return {p, q};
}

std::pair<double, double> draw_pq_stationary(const std::vector<int>& S,
                                             const HyperParams& h, Rng& rng) {
  // The weight is the stationary probability of the observed S_1 and lies in
  // (0,1), so the beta proposal dominates the exact conditional.
  for (;;) {
    auto [p, q] = draw_pq(S, h, rng);
    double w = (S[0] == 1 ? (1.0 - p) : (1.0 - q)) / (2.0 - p - q);
    if (rng.uniform() <= w) return {p, q};
  }
}

}  // namespace rrmix
