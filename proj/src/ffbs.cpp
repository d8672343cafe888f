#include "rrmix/ffbs.hpp"

#include <cmath>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

YearBlocks group_by_year(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                         const std::vector<int>& year_index, int T) {
  std::vector<std::vector<int>> idx(T);
  for (int i = 0; i < z.size(); ++i) idx[year_index[i]].push_back(i);
  YearBlocks b;
  b.X.resize(T);
  b.z.resize(T);
  for (int t = 0; t < T; ++t) {
    const auto& rows = idx[t];
    b.X[t].resize(static_cast<int>(rows.size()), X.cols());
    b.z[t].resize(static_cast<int>(rows.size()));
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      b.X[t].row(r) = X.row(rows[r]);
      b.z[t](r) = z(rows[r]);
    }
  }
  return b;
}

double year_loglik(const Eigen::VectorXd& z_year, const Eigen::MatrixXd& X_year,
                   const Eigen::VectorXd& beta) {
  if (z_year.size() == 0) return 0.0;
  Eigen::VectorXd resid = z_year - X_year * beta;
  constexpr double kLog2Pi = 1.8378770664093454836;
  return -0.5 * (kLog2Pi * static_cast<double>(resid.size()) +
                 resid.squaredNorm());
}

double steady_state_prob(double p, double q) {
  if (!(p > 0 && p < 1 && q > 0 && q < 1)) {
    if (p == 1.0 && q == 1.0) {
      throw DomainError("steady_state_prob: degenerate chain (p=q=1)");
    }
    throw DomainError("steady_state_prob: p, q must lie in (0,1)");
  }
  return (1.0 - p) / (2.0 - p - q);
}

FilterResult hamilton_filter(const YearBlocks& blocks,
                             const Eigen::VectorXd& beta0,
                             const Eigen::VectorXd& beta1, double p, double q) {
  Eigen::MatrixXd ll(blocks.t(), 2);
  for (int t = 0; t < blocks.t(); ++t) {
    ll(t, 0) = year_loglik(blocks.z[t], blocks.X[t], beta0);
    ll(t, 1) = year_loglik(blocks.z[t], blocks.X[t], beta1);
  }
  return hamilton_filter(ll, p, q);
}

FilterResult hamilton_filter(const Eigen::MatrixXd& year_logliks, double p,
                             double q) {
  if (!(p > 0 && p < 1 && q > 0 && q < 1)) {
    throw ConfigError("hamilton_filter: p, q must lie strictly in (0,1)");
  }
  const int T = static_cast<int>(year_logliks.rows());
  if (T < 1) throw ConfigError("hamilton_filter: T must be >= 1");

  FilterResult f;
  f.predicted.resize(T, 2);
  f.filtered.resize(T, 2);
  f.loglik = 0.0;

  double pi1 = steady_state_prob(p, q);
  double prev0 = 1.0 - pi1, prev1 = pi1;
  for (int t = 0; t < T; ++t) {
    double pred0, pred1;
    if (t == 0) {
      pred0 = prev0;
      pred1 = prev1;
    } else {
      pred0 = p * prev0 + (1.0 - q) * prev1;
      pred1 = (1.0 - p) * prev0 + q * prev1;
    }
    f.predicted(t, 0) = pred0;
    f.predicted(t, 1) = pred1;

    double w0 = std::log(pred0) + year_logliks(t, 0);
    double w1 = std::log(pred1) + year_logliks(t, 1);
    double m = std::max(w0, w1);
    double e0 = std::exp(w0 - m), e1 = std::exp(w1 - m);
    double norm = e0 + e1;
    f.filtered(t, 0) = e0 / norm;
    f.filtered(t, 1) = e1 / norm;
    f.loglik += m + std::log(norm);
    prev0 = f.filtered(t, 0);
    prev1 = f.filtered(t, 1);
  }
  return f;
}

std::vector<int> backward_sample(const FilterResult& f, double p, double q,
                                 Rng& rng) {
  const int T = static_cast<int>(f.filtered.rows());
  std::vector<int> S(T);
  S[T - 1] = (rng.uniform() < f.filtered(T - 1, 1)) ? 1 : 0;
  for (int t = T - 2; t >= 0; --t) {
    // Pr(S_t | z_{1:t}) times the transition into the already drawn S_{t+1}.
    double to1 = S[t + 1] == 1 ? q : (1.0 - q);
    double to0 = S[t + 1] == 1 ? (1.0 - p) : p;
    double w1 = f.filtered(t, 1) * to1;
    double w0 = f.filtered(t, 0) * to0;
    S[t] = (rng.uniform() < w1 / (w0 + w1)) ? 1 : 0;
  }
  return S;
}

Eigen::VectorXd smoothed_marginals(const FilterResult& f, double p, double q) {
  const int T = static_cast<int>(f.filtered.rows());
  Eigen::VectorXd out(T);
  out(T - 1) = f.filtered(T - 1, 1);
  double next0 = f.filtered(T - 1, 0), next1 = out(T - 1);
  for (int t = T - 2; t >= 0; --t) {
    // Kim smoother for a two-state chain.
    double pred0 = p * f.filtered(t, 0) + (1.0 - q) * f.filtered(t, 1);
    double pred1 = (1.0 - p) * f.filtered(t, 0) + q * f.filtered(t, 1);
    double s1 = f.filtered(t, 1) *
                (q * next1 / pred1 + (1.0 - q) * next0 / pred0);
    double s0 = f.filtered(t, 0) *
                (p * next0 / pred0 + (1.0 - p) * next1 / pred1);
    double norm = s0 + s1;
    out(t) = s1 / norm;
    next0 = s0 / norm;
    next1 = out(t);
  }
  return out;
}

}  // namespace rrmix
