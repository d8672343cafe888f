#include "rrmix/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void HyperParams::validate() const {
  if (J < 2) throw ConfigError("HyperParams: J must be >= 2");
  if (K < 0) throw ConfigError("HyperParams: K must be >= 0");
  if (mu_bar.size() != J || v_mu_bar.size() != J || a_bar.size() != J ||
      b_bar.size() != J) {
    throw ConfigError("HyperParams: per-component vectors must have length J");
  }
  auto all_pos = [](const Eigen::VectorXd& v) { return (v.array() > 0).all(); };
  if (!all_pos(v_mu_bar) || !all_pos(a_bar) || !all_pos(b_bar)) {
    throw ConfigError("HyperParams: variances and IG constants must be positive");
  }
  if (!(r_bar > 0 && delta_bar > 0 && u00 > 0 && u01 > 0 && u10 > 0 && u11 > 0)) {
    throw ConfigError("HyperParams: gamma/beta constants must be positive");
  }
  if (sigma_eps2 != 1.0) {
    throw ConfigError("HyperParams: sigma_eps2 is fixed at 1");
  }
  if (!(intercept_var > 0 && cutpoint_ref_max > 0)) {
    throw ConfigError("HyperParams: intercept_var and cutpoint_ref_max must be positive");
  }
}

HyperParams default_hyperparams(int J, int K) {
  if (J < 2) throw ConfigError("default_hyperparams: J must be >= 2");
  if (K < 0) throw ConfigError("default_hyperparams: K must be >= 0");
  HyperParams h;
  h.J = J;
  h.K = K;
  h.mu_bar = Eigen::VectorXd::Zero(J);
  h.v_mu_bar = Eigen::VectorXd::Constant(J, 100.0);
  h.a_bar = Eigen::VectorXd::Constant(J, 3.0);
  h.b_bar = Eigen::VectorXd::Constant(J, 1.0);
  h.r_bar = 3.0;
  h.delta_bar = 1.0;
  h.u00 = h.u01 = h.u10 = h.u11 = 0.5;
  return h;
}

HyperParams hyperparams_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("hyperparameter config: ") + e.what());
  }
  int J = j.value("J", 4);
  int K = j.value("K", 20);
  HyperParams h = default_hyperparams(J, K);
  auto read_vec = [&](const char* key, Eigen::VectorXd& out) {
    if (!j.contains(key)) return;
    auto arr = j.at(key);
    if (arr.is_number()) {
      out.setConstant(arr.get<double>());
      return;
    }
    if (static_cast<int>(arr.size()) != J) {
      throw ConfigError(std::string("hyperparameter config: ") + key +
                        " must have length J");
    }
    for (int i = 0; i < J; ++i) out(i) = arr[i].get<double>();
  };
  read_vec("mu_bar", h.mu_bar);
  read_vec("v_mu_bar", h.v_mu_bar);
  read_vec("a_bar", h.a_bar);
  read_vec("b_bar", h.b_bar);
  h.r_bar = j.value("r_bar", h.r_bar);
  h.delta_bar = j.value("delta_bar", h.delta_bar);
  h.u00 = j.value("u00", h.u00);
  h.u01 = j.value("u01", h.u01);
  h.u10 = j.value("u10", h.u10);
  h.u11 = j.value("u11", h.u11);
  h.intercept_var = j.value("intercept_var", h.intercept_var);
  h.cutpoint_ref_max = j.value("cutpoint_ref_max", h.cutpoint_ref_max);
  h.validate();
  return h;
}

std::string hyperparams_to_json(const HyperParams& h) {
  nlohmann::json j;
  j["J"] = h.J;
  j["K"] = h.K;
  j["mu_bar"] = std::vector<double>(h.mu_bar.begin(), h.mu_bar.end());
  j["v_mu_bar"] = std::vector<double>(h.v_mu_bar.begin(), h.v_mu_bar.end());
  j["a_bar"] = std::vector<double>(h.a_bar.begin(), h.a_bar.end());
  j["b_bar"] = std::vector<double>(h.b_bar.begin(), h.b_bar.end());
  j["r_bar"] = h.r_bar;
  j["delta_bar"] = h.delta_bar;
  j["u00"] = h.u00;
  j["u01"] = h.u01;
  j["u10"] = h.u10;
  j["u11"] = h.u11;
  j["intercept_var"] = h.intercept_var;
  j["cutpoint_ref_max"] = h.cutpoint_ref_max;
  return j.dump(2);
}

void ModelState::check_invariants() const {
  const int J = j();
  if (sigma2.size() != J || c.size() != J + 1) {
    throw DomainError("ModelState: dimension mismatch in mixture blocks");
  }
  for (int i = 0; i + 1 < J; ++i) {
    if (!(mu(i) < mu(i + 1))) throw DomainError("ModelState: mu not ascending");
  }
  if (!(sigma2.array() > 0).all()) {
    throw DomainError("ModelState: non-positive sigma2");
  }
  if (c(0) != -kInf || c(1) != 0.0 || c(J) != kInf) {
    throw DomainError("ModelState: fixed cut-points violated");
  }
  for (int i = 1; i + 1 < J; ++i) {
    if (!(c(i) < c(i + 1))) throw DomainError("ModelState: cut-points not increasing");
  }
  if (!(tau0.array() > 0).all() || !(tau1.array() > 0).all()) {
    throw DomainError("ModelState: non-positive tau");
  }
  if (!(lambda0_2 > 0 && lambda1_2 > 0)) {
    throw DomainError("ModelState: non-positive lambda^2");
  }
  if (!(p > 0 && p < 1 && q > 0 && q < 1)) {
    throw DomainError("ModelState: p, q must lie in (0,1)");
  }
  for (int s : S) {
    if (s != 0 && s != 1) throw DomainError("ModelState: S entries must be 0/1");
  }
  if (static_cast<int>(zstar.size()) != z.size()) {
    throw DomainError("ModelState: z / zstar length mismatch");
  }
  for (int i = 0; i < z.size(); ++i) {
    int zj = zstar[i];
    if (zj < 1 || zj > J) throw DomainError("ModelState: zstar out of range");
    if (!(c(zj - 1) < z(i) && z(i) <= c(zj))) {
      throw DomainError("ModelState: z outside its component interval");
    }
  }
}

namespace {

// Component index (1..J) of a latent score under the cut-points.
int interval_of(double zi, const Eigen::VectorXd& c) {
  const int J = static_cast<int>(c.size()) - 1;
  for (int j = 1; j < J; ++j) {
    if (zi <= c(j)) return j;
  }
  return J;
}

ModelState sample_prior_common(const HyperParams& h, int T, Rng& rng) {
  h.validate();
  const int J = h.J;
  const int K = h.K;
  ModelState s;

  s.mu.resize(J);
  for (int j = 0; j < J; ++j) s.mu(j) = rng.normal(h.mu_bar(j), std::sqrt(h.v_mu_bar(j)));
  std::sort(s.mu.begin(), s.mu.end());

  s.sigma2.resize(J);
  for (int j = 0; j < J; ++j) s.sigma2(j) = rng.inverse_gamma(h.a_bar(j), h.b_bar(j));

  s.c.resize(J + 1);
  s.c(0) = -kInf;
  s.c(1) = 0.0;
  s.c(J) = kInf;
  if (J > 2) {
    std::vector<double> interior(J - 2);
    for (auto& v : interior) v = rng.uniform(0.0, h.cutpoint_ref_max);
    std::sort(interior.begin(), interior.end());
    for (int j = 2; j < J; ++j) s.c(j) = interior[j - 2];
  }

  // LASSO hierarchy: lambda^2 -> tau -> beta, intercept diffuse.
  auto draw_block = [&](double& lambda2, Eigen::VectorXd& tau,
                        Eigen::VectorXd& beta) {
    lambda2 = rng.gamma(h.r_bar, h.delta_bar);
    tau.resize(K);
    beta.resize(K + 1);
    beta(0) = rng.normal(0.0, std::sqrt(h.intercept_var));
    for (int k = 0; k < K; ++k) {
      tau(k) = rng.exponential(lambda2 / 2.0);
      beta(k + 1) = rng.normal(0.0, std::sqrt(h.sigma_eps2 * tau(k)));
    }
  };
  draw_block(s.lambda0_2, s.tau0, s.beta0);
  draw_block(s.lambda1_2, s.tau1, s.beta1);

  s.p = rng.beta(h.u00, h.u01);
  s.q = rng.beta(h.u11, h.u10);

  s.S.resize(T);
  double pi1 = (1.0 - s.p) / (2.0 - s.p - s.q);
  s.S[0] = (rng.uniform() < pi1) ? 1 : 0;
  for (int t = 1; t < T; ++t) {
    if (s.S[t - 1] == 0) {
      s.S[t] = (rng.uniform() < s.p) ? 0 : 1;
    } else {
      s.S[t] = (rng.uniform() < s.q) ? 1 : 0;
    }
  }
  return s;
}

}  // namespace

ModelState sample_prior_state(const HyperParams& h, const DesignMatrix& d,
                              Rng& rng) {
  ModelState s = sample_prior_common(h, d.t(), rng);
  const int n = d.n();
  s.z.resize(n);
  s.zstar.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& beta = s.S[d.year_index[i]] == 0 ? s.beta0 : s.beta1;
    s.z(i) = rng.normal(d.X.row(i).dot(beta), 1.0);
    s.zstar[i] = interval_of(s.z(i), s.c);
  }
  return s;
}

ModelState sample_prior_state(const HyperParams& h, int n, int T, Rng& rng) {
  if (n < 1 || T < 1) throw ConfigError("sample_prior_state: n, T must be >= 1");
  ModelState s = sample_prior_common(h, T, rng);
  s.z.resize(n);
  s.zstar.resize(n);
  // Without a design the score regression is intercept-only; loans are
  // spread over years round-robin.
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& beta = s.S[i % T] == 0 ? s.beta0 : s.beta1;
    s.z(i) = rng.normal(beta(0), 1.0);
    s.zstar[i] = interval_of(s.z(i), s.c);
  }
  return s;
}

double log_prior_density(const ModelState& s, const HyperParams& h) {
  h.validate();
  const int J = h.J;
  const int K = h.K;
  if (s.j() != J || s.k() != K) {
    throw DomainError("log_prior_density: state does not match hyperparams");
  }
  const double neg_inf = -kInf;
  if (!(s.sigma2.array() > 0).all() || !(s.tau0.array() > 0).all() ||
      !(s.tau1.array() > 0).all() || !(s.lambda0_2 > 0) || !(s.lambda1_2 > 0) ||
      !(s.p > 0 && s.p < 1 && s.q > 0 && s.q < 1)) {
    return neg_inf;
  }
  for (int j = 0; j + 1 < J; ++j) {
    if (!(s.mu(j) < s.mu(j + 1))) return neg_inf;
  }

  double lp = 0.0;
  // mu: independent normals restricted to the ordered region (the
  // truncation normalization constant is omitted).
  for (int j = 0; j < J; ++j) {
    lp += norm_logpdf(s.mu(j), h.mu_bar(j), h.v_mu_bar(j));
  }
  // sigma2: IG(a, b), log density = a log b - lgamma(a) - (a+1) log x - b/x.
  for (int j = 0; j < J; ++j) {
    double a = h.a_bar(j), b = h.b_bar(j), x = s.sigma2(j);
    lp += a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
  }
  // LASSO hierarchy per state.
  auto block = [&](double lambda2, const Eigen::VectorXd& tau,
                   const Eigen::VectorXd& beta) {
    double out = h.r_bar * std::log(h.delta_bar) - std::lgamma(h.r_bar) +
                 (h.r_bar - 1.0) * std::log(lambda2) - h.delta_bar * lambda2;
    out += norm_logpdf(beta(0), 0.0, h.intercept_var);
    for (int k = 0; k < K; ++k) {
      double rate = lambda2 / 2.0;
      out += std::log(rate) - rate * tau(k);
      out += norm_logpdf(beta(k + 1), 0.0, h.sigma_eps2 * tau(k));
    }
    return out;
  };
  lp += block(s.lambda0_2, s.tau0, s.beta0);
  lp += block(s.lambda1_2, s.tau1, s.beta1);
  // p, q beta priors.
  auto log_beta_pdf = [](double x, double a, double b) {
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
           (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  };
  lp += log_beta_pdf(s.p, h.u00, h.u01);
  lp += log_beta_pdf(s.q, h.u11, h.u10);
  return lp;
}

}  // namespace rrmix
