#include "rrmix/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

namespace {

std::vector<double> extract(const Chain& chain,
                            double (*f)(const ChainDraw&)) {
  std::vector<double> out;
  out.reserve(chain.draws.size());
  for (const auto& d : chain.draws) out.push_back(f(d));
  return out;
}

double trace_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

nlohmann::json summary_json(const PosteriorSummary& s) {
  return {{"mean", s.mean},   {"hpd_lo", s.hpd_lo},
          {"hpd_hi", s.hpd_hi}, {"ess", s.ess},
          {"significant", s.significant}, {"flagged", s.flagged}};
}

void summary_csv(std::ostream& os, const PosteriorSummary& s) {
  os << s.mean << ',' << s.hpd_lo << ',' << s.hpd_hi << ',' << s.ess;
}

}  // namespace

std::pair<double, double> hpd_interval(std::vector<double> draws, double mass) {
  const int m = static_cast<int>(draws.size());
  if (m < 50) throw DomainError("hpd_interval: need at least 50 draws");
  if (!(mass > 0 && mass <= 1)) {
    throw DomainError("hpd_interval: mass must lie in (0,1]");
  }
  std::sort(draws.begin(), draws.end());
  int w = static_cast<int>(std::ceil(mass * m));
  w = std::min(std::max(w, 1), m);
  double lo = draws[0], hi = draws[w - 1];
  for (int i = 1; i + w <= m; ++i) {
    if (draws[i + w - 1] - draws[i] < hi - lo) {
      lo = draws[i];
      hi = draws[i + w - 1];
    }
  }
  return {lo, hi};
}

double ess(const std::vector<double>& draws) {
  const int m = static_cast<int>(draws.size());
  if (m < 100) throw DomainError("ess: need at least 100 draws");
  double mean = trace_mean(draws);
  double var = 0.0;
  for (double x : draws) var += (x - mean) * (x - mean);
  var /= m;
  if (!(var > 0)) return 1.0;  // constant trace: floor, caller flags
  // Geyer's initial monotone positive-pair-sequence truncation. Stopping at
  // the first single negative autocorrelation instead would cut the sum on
  // ACF noise (sd ~ 1/sqrt(m)) long before a slowly decaying tail has been
  // accumulated, overstating the ESS.
  auto rho_at = [&](int lag) {
    double acov = 0.0;
    for (int i = 0; i + lag < m; ++i) {
      acov += (draws[i] - mean) * (draws[i + lag] - mean);
    }
    return acov / (m * var);
  };
  double tau = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; 2 * k + 1 < m; ++k) {
    double g = rho_at(2 * k) + rho_at(2 * k + 1);  // rho(0) = 1
    if (g <= 0) break;
    g = std::min(g, prev);  // enforce monotone decrease
    prev = g;
    tau += g;
  }
  tau = std::max(2.0 * tau - 1.0, 1.0);
  double e = m / tau;
  return std::clamp(e, 1e-12, static_cast<double>(m));
}

PosteriorSummary summarize_scalar(const std::vector<double>& draws,
                                  double mass) {
  PosteriorSummary s;
  s.mean = trace_mean(draws);
  std::tie(s.hpd_lo, s.hpd_hi) = hpd_interval(draws, mass);
  s.ess = ess(draws);
  s.significant = !(s.hpd_lo <= 0.0 && 0.0 <= s.hpd_hi);
  double lo = *std::min_element(draws.begin(), draws.end());
  double hi = *std::max_element(draws.begin(), draws.end());
  s.flagged = (lo == hi);
  return s;
}

MixtureReport mixture_report(const Chain& chain, double mass,
                             bool mean_rr_from_mu) {
  const int J = chain.J;
  const int m = chain.retained();
  MixtureReport rep;
  rep.mean_rr_from_mu = mean_rr_from_mu;
  rep.components.resize(J);
  for (int j = 0; j < J; ++j) {
    std::vector<double> mu_t(m), sd_t(m), w_t(m), rr_t;
    rr_t.reserve(m);
    for (int g = 0; g < m; ++g) {
      mu_t[g] = chain.draws[g].mu(j);
      sd_t[g] = std::sqrt(chain.draws[g].sigma2(j));
      w_t[g] = chain.draws[g].comp_weight(j);
      double rr = chain.draws[g].comp_mean_rr(j);
      if (!std::isnan(rr)) rr_t.push_back(rr);
    }
    MixtureComponentRow& row = rep.components[j];
    row.mu = summarize_scalar(mu_t, mass);
    row.sigma = summarize_scalar(sd_t, mass);
    row.weight = summarize_scalar(w_t, mass);
    row.occupied = !rr_t.empty();
    if (mean_rr_from_mu) {
      row.mean_rr = norm_cdf(row.mu.mean);
    } else if (row.occupied) {
      row.mean_rr = trace_mean(rr_t);
    } else {
      row.mean_rr = std::numeric_limits<double>::quiet_NaN();
    }
    if (!row.occupied) {
      row.mu.flagged = row.sigma.flagged = row.weight.flagged = true;
    }
  }
  return rep;
}

CycleReport cycle_report(const Chain& chain, double mass) {
  if (chain.config.model != ModelKind::kDynamic) {
    throw ConfigError("cycle_report: not applicable to a static chain");
  }
  const int m = chain.retained();
  CycleReport rep;
  rep.years = chain.years;
  rep.prob_state1.assign(chain.T, 0.0);
  std::vector<double> p_t(m), q_t(m), ss_t(m);
  for (int g = 0; g < m; ++g) {
    const ChainDraw& d = chain.draws[g];
    for (int t = 0; t < chain.T; ++t) rep.prob_state1[t] += d.S[t];
    p_t[g] = d.p;
    q_t[g] = d.q;
    ss_t[g] = steady_state_prob(d.p, d.q);
  }
  for (auto& v : rep.prob_state1) v /= m;
  rep.p = summarize_scalar(p_t, mass);
  rep.q = summarize_scalar(q_t, mass);
  rep.steady = summarize_scalar(ss_t, mass);
  return rep;
}

CoefficientReport coefficient_report(const Chain& chain, double mass) {
  const bool dynamic = chain.config.model == ModelKind::kDynamic;
  const int m = chain.retained();
  const int states = dynamic ? 2 : 1;
  CoefficientReport rep;
  std::vector<std::string> names;
  names.push_back("INTERCEPT");
  names.insert(names.end(), chain.determinant_names.begin(),
               chain.determinant_names.end());

  for (int st = 0; st < states; ++st) {
    Eigen::VectorXd mean_beta = Eigen::VectorXd::Zero(chain.K + 1);
    for (int k = 0; k <= chain.K; ++k) {
      std::vector<double> tr(m);
      for (int g = 0; g < m; ++g) {
        const ChainDraw& d = chain.draws[g];
        tr[g] = st == 0 ? d.beta0(k) : d.beta1(k);
      }
      CoefficientRow row;
      row.name = names[k];
      row.state = st;
      row.summary = summarize_scalar(tr, mass);
      if (row.summary.significant) {
        row.sign = row.summary.mean > 0 ? '+' : '-';
      }
      mean_beta(k) = row.summary.mean;
      rep.rows.push_back(std::move(row));
    }
    // Destandardization is linear per coefficient, so it commutes with the
    // posterior mean.
    Eigen::VectorXd raw = destandardize_coefficients(mean_beta, chain.scaling);
    for (int k = 0; k <= chain.K; ++k) {
      rep.rows[st * (chain.K + 1) + k].destandardized_mean = raw(k);
    }
    std::vector<double> lam(m);
    for (int g = 0; g < m; ++g) {
      lam[g] = st == 0 ? chain.draws[g].lambda0_2 : chain.draws[g].lambda1_2;
    }
    rep.lambda2_mpm[st] = trace_mean(lam);
  }
  return rep;
}

std::string mixture_report_csv(const MixtureReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "component,mu_mean,mu_hpd_lo,mu_hpd_hi,mu_ess,"
        "sigma_mean,sigma_hpd_lo,sigma_hpd_hi,sigma_ess,"
        "weight_mean,weight_hpd_lo,weight_hpd_hi,weight_ess,"
        "mean_rr,occupied\n";
  for (size_t j = 0; j < r.components.size(); ++j) {
    const auto& c = r.components[j];
    os << (j + 1) << ',';
    summary_csv(os, c.mu);
    os << ',';
    summary_csv(os, c.sigma);
    os << ',';
    summary_csv(os, c.weight);
    os << ',' << c.mean_rr << ',' << (c.occupied ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string mixture_report_json(const MixtureReport& r) {
  nlohmann::json j;
  j["mean_rr_from_mu"] = r.mean_rr_from_mu;
  j["components"] = nlohmann::json::array();
  for (size_t k = 0; k < r.components.size(); ++k) {
    const auto& c = r.components[k];
    j["components"].push_back({{"component", k + 1},
                               {"mu", summary_json(c.mu)},
                               {"sigma", summary_json(c.sigma)},
                               {"weight", summary_json(c.weight)},
                               {"mean_rr", c.mean_rr},
                               {"occupied", c.occupied}});
  }
  return j.dump(2);
}

std::string cycle_report_csv(const CycleReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "quantity,mean,hpd_lo,hpd_hi,ess\n";
  os << "p,";
  summary_csv(os, r.p);
  os << "\nq,";
  summary_csv(os, r.q);
  os << "\nsteady_state,";
  summary_csv(os, r.steady);
  os << '\n';
  for (size_t t = 0; t < r.years.size(); ++t) {
    os << "prob_state1_" << r.years[t] << ',' << r.prob_state1[t] << ",,,\n";
  }
  return os.str();
}

std::string cycle_report_json(const CycleReport& r) {
  nlohmann::json j;
  j["p"] = summary_json(r.p);
  j["q"] = summary_json(r.q);
  j["steady_state"] = summary_json(r.steady);
  j["years"] = r.years;
  j["prob_state1"] = r.prob_state1;
  return j.dump(2);
}

std::string cycle_series_tsv(const CycleReport& r) {
  std::ostringstream os;
  os.precision(10);
  for (size_t t = 0; t < r.years.size(); ++t) {
    os << r.years[t] << '\t' << r.prob_state1[t] << '\n';
  }
  return os.str();
}

std::string coefficient_report_csv(const CoefficientReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "name,state,mean,hpd_lo,hpd_hi,ess,significant,sign,destandardized_mean\n";
  for (const auto& row : r.rows) {
    os << row.name << ',' << row.state << ',';
    summary_csv(os, row.summary);
    os << ',' << (row.summary.significant ? 1 : 0) << ',' << row.sign << ','
       << row.destandardized_mean << '\n';
  }
  os << "lambda2_mpm_state0,0," << r.lambda2_mpm[0] << ",,,,,,\n";
  os << "lambda2_mpm_state1,1," << r.lambda2_mpm[1] << ",,,,,,\n";
  return os.str();
}

std::string coefficient_report_json(const CoefficientReport& r) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"name", row.name},
                         {"state", row.state},
                         {"summary", summary_json(row.summary)},
                         {"sign", std::string(1, row.sign)},
                         {"destandardized_mean", row.destandardized_mean}});
  }
  j["lambda2_mpm"] = {r.lambda2_mpm[0], r.lambda2_mpm[1]};
  return j.dump(2);
}

std::string diagnostics_csv(const Chain& chain) {
  const int m = chain.retained();
  std::ostringstream os;
  os.precision(10);
  os << "parameter,ess,mean\n";
  auto emit = [&](const std::string& name, const std::vector<double>& tr) {
    os << name << ',' << ess(tr) << ',' << trace_mean(tr) << '\n';
  };
  std::vector<double> tr(m);
  for (int j = 0; j < chain.J; ++j) {
    for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].mu(j);
    emit("mu_" + std::to_string(j + 1), tr);
    for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].sigma2(j);
    emit("sigma2_" + std::to_string(j + 1), tr);
  }
  for (int k = 0; k <= chain.K; ++k) {
    for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].beta0(k);
    emit("beta0_" + std::to_string(k), tr);
  }
  if (chain.config.model == ModelKind::kDynamic) {
    for (int k = 0; k <= chain.K; ++k) {
      for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].beta1(k);
      emit("beta1_" + std::to_string(k), tr);
    }
    for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].p;
    emit("p", tr);
    for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].q;
    emit("q", tr);
  }
  for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].lambda0_2;
  emit("lambda2_state0", tr);
  if (chain.config.model == ModelKind::kDynamic) {
    for (int g = 0; g < m; ++g) tr[g] = chain.draws[g].lambda1_2;
    emit("lambda2_state1", tr);
  }
  return os.str();
}

}  // namespace rrmix
