#include "rrmix/synthgen.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streams for the generator's RNG splits.
constexpr std::uint64_t kStreamStates = 99;
constexpr std::uint64_t kStreamYear = 100;

double boundary_tolerant_pi1(double p, double q) {
  if (p == 1.0 && q == 1.0) return 0.5;
  return (1.0 - p) / (2.0 - p - q);
}

int interval_of(double z, const Eigen::VectorXd& c) {
  for (int j = 1; j < c.size(); ++j) {
    if (z <= c(j)) return j;
  }
  return static_cast<int>(c.size()) - 1;
}

CovSpec bernoulli(double mean) {
  CovSpec s;
  s.kind = CovSpec::Kind::kBernoulli;
  s.a = mean;
  return s;
}

CovSpec lognormal(double median, double q1, double q3) {
  CovSpec s;
  s.kind = CovSpec::Kind::kLogNormal;
  s.a = std::log(median);
  s.b = std::log(q3 / q1) / (2.0 * 0.6744897501960817);
  return s;
}

CovSpec truncnormal(double mean, double sd, double lo, double hi) {
  CovSpec s;
  s.kind = CovSpec::Kind::kTruncNormal;
  s.a = mean;
  s.b = sd;
  s.lo = lo;
  s.hi = hi;
  return s;
}

CovSpec product(int src1, int src2) {
  CovSpec s;
  s.kind = CovSpec::Kind::kProduct;
  s.src1 = src1;
  s.src2 = src2;
  return s;
}

CovSpec square(int src) {
  CovSpec s;
  s.kind = CovSpec::Kind::kSquare;
  s.src1 = src;
  return s;
}

void validate_truth(const GenTruth& t) {
  const int J = t.j();
  if (J < 2) throw ConfigError("generate: truth needs J >= 2");
  if (t.sigma2.size() != J || t.c.size() != J + 1) {
    throw ConfigError("generate: truth dimension mismatch");
  }
  for (int j = 1; j < J; ++j) {
    if (!(t.mu(j) > t.mu(j - 1))) throw ConfigError("generate: mu not ascending");
  }
  if (!(t.sigma2.array() > 0).all()) {
    throw ConfigError("generate: sigma2 must be positive");
  }
  if (t.c(0) != -kInf || t.c(1) != 0.0 || t.c(J) != kInf) {
    throw ConfigError("generate: cut-point endpoints must be -inf, 0, ..., +inf");
  }
  for (int j = 2; j < J; ++j) {
    if (!(t.c(j) > t.c(j - 1))) throw ConfigError("generate: cut-points not ascending");
  }
  if (t.beta1.size() != t.beta0.size()) {
    throw ConfigError("generate: beta0/beta1 length mismatch");
  }
  if (!(t.p >= 0 && t.p <= 1 && t.q >= 0 && t.q <= 1)) {
    throw ConfigError("generate: p, q must lie in [0,1]");
  }
}

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) {
    if (std::isinf(v(i))) {
      a.push_back(v(i) > 0 ? "inf" : "-inf");
    } else {
      a.push_back(v(i));
    }
  }
  return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_string()) {
      v(i) = a[i].get<std::string>() == "inf" ? kInf : -kInf;
    } else {
      v(i) = a[i].get<double>();
    }
  }
  return v;
}

}  // namespace

std::vector<CovSpec> table1_preset() {
  std::vector<CovSpec> cov(kNumDeterminants);
  cov[0] = lognormal(96.0, 35.0, 208.5);      // LOANSIZE
  cov[1] = bernoulli(0.48);                   // LOANTYPE
  cov[2] = product(1, 12);                    // LOANTYPE_X_FIRMSIZE
  cov[3] = bernoulli(0.62);                   // ALLASSETCOLL
  cov[4] = bernoulli(0.10);                   // INVENTRECIVECOLL
  cov[5] = bernoulli(0.17);                   // OTHERCOLL
  cov[6] = bernoulli(0.08);                   // PREPACK
  cov[7] = bernoulli(0.13);                   // RESTRUCTURE
  cov[8] = bernoulli(0.01);                   // OTHERDEFAULT
  cov[9] = lognormal(9.67, 2.59, 18.42);      // TIMETOEMERGE
  cov[10] = square(9);                        // TIMETOEMERGE_SQ
  cov[11] = product(6, 9);                    // PREPACK_X_TIMETOEMERGE
  cov[12] = lognormal(665.5, 227.4, 1365.7);  // FIRMSIZE
  cov[13] = lognormal(0.44, 0.13, 0.82);      // FIRMPPE
  cov[14] = lognormal(0.09, 0.05, 0.14);      // FIRMCF
  cov[15] = lognormal(0.94, 0.77, 1.26);      // FIRMLEV
  cov[16] = bernoulli(0.15);                  // EVERDEFAULTED
  cov[17] = truncnormal(2.61, 2.30, 0.06, 4.79);  // GDP
  cov[18] = bernoulli(0.18);                  // INDDISTRESS
  cov[19] = lognormal(0.03, 0.02, 0.04);      // AIS
  return cov;
}

GenTruth default_gen_truth(int J, int K, double intercept_gap) {
  GenTruth t;
  t.mu.resize(J);
  t.sigma2 = Eigen::VectorXd::Constant(J, 0.4);
  for (int j = 0; j < J; ++j) {
    t.mu(j) = -3.0 + 6.0 * j / std::max(J - 1, 1);
  }
  t.c.resize(J + 1);
  t.c(0) = -kInf;
  t.c(1) = 0.0;
  for (int j = 2; j < J; ++j) t.c(j) = 1.2 * (j - 1);
  t.c(J) = kInf;
  t.beta0 = Eigen::VectorXd::Zero(K + 1);
  t.beta1 = Eigen::VectorXd::Zero(K + 1);
  t.beta0(0) = 0.4 - intercept_gap / 2.0;
  t.beta1(0) = 0.4 + intercept_gap / 2.0;
  // A few strong effects, a few weak, the rest exactly zero (shrinkage
  // fixtures want sparse truth).
  for (int k = 1; k <= K; ++k) {
    if (k % 5 == 1) {
      t.beta0(k) = 0.8;
      t.beta1(k) = 0.5;
    } else if (k % 5 == 3) {
      t.beta0(k) = -0.4;
      t.beta1(k) = -0.6;
    }
  }
  t.p = 0.85;
  t.q = 0.85;
  return t;
}

std::pair<LoanDataset, GroundTruth> generate(const GenTruth& truth,
                                             const std::vector<int>& n_per_year,
                                             const std::vector<CovSpec>& cov,
                                             std::uint64_t seed, int first_year,
                                             double epsilon) {
  validate_truth(truth);
  const int T = static_cast<int>(n_per_year.size());
  const int K = truth.k();
  if (T < 1) throw ConfigError("generate: need at least one year");
  if (static_cast<int>(cov.size()) != K) {
    throw ConfigError("generate: cov_spec length must equal K");
  }
  long long n_total = 0;
  for (int nt : n_per_year) {
    if (nt < 0) throw ConfigError("generate: negative loans in a year");
    n_total += nt;
  }
  if (n_total < 1) throw ConfigError("generate: total loans must be >= 1");
  const int n = static_cast<int>(n_total);

  for (int k = 0; k < K; ++k) {
    const CovSpec& s = cov[k];
    bool derived = s.kind == CovSpec::Kind::kProduct ||
                   s.kind == CovSpec::Kind::kSquare;
    if (derived) {
      auto bad = [&](int src) { return src < 0 || src >= K || src == k; };
      if (bad(s.src1) || (s.kind == CovSpec::Kind::kProduct && bad(s.src2))) {
        throw ConfigError("generate: derived column " + std::to_string(k) +
                          " has invalid sources");
      }
      const auto base = [&](int src) {
        return cov[src].kind != CovSpec::Kind::kProduct &&
               cov[src].kind != CovSpec::Kind::kSquare;
      };
      if (!base(s.src1) || (s.kind == CovSpec::Kind::kProduct && !base(s.src2))) {
        throw ConfigError("generate: derived columns must source base columns");
      }
    }
    if (s.kind == CovSpec::Kind::kBernoulli && !(s.a >= 0 && s.a <= 1)) {
      throw ConfigError("generate: Bernoulli mean outside [0,1]");
    }
    if (s.kind == CovSpec::Kind::kTruncNormal && !(s.lo < s.hi && s.b > 0)) {
      throw ConfigError("generate: degenerate truncated-normal spec");
    }
  }

  // States forward from the stationary start; p=q=1 keeps the initial draw.
  GroundTruth gt;
  gt.params = truth;
  gt.seed = seed;
  gt.epsilon = epsilon;
  gt.S.resize(T);
  Rng state_rng(seed, 0, kStreamStates);
  gt.S[0] = state_rng.uniform() < boundary_tolerant_pi1(truth.p, truth.q) ? 1 : 0;
  for (int t = 1; t < T; ++t) {
    double stay = gt.S[t - 1] == 0 ? truth.p : truth.q;
    gt.S[t] = state_rng.uniform() < stay ? gt.S[t - 1] : 1 - gt.S[t - 1];
  }

  // Raw covariates, base columns first, derived columns recomputed after.
  Eigen::MatrixXd raw(n, K);
  std::vector<int> year_of(n);
  {
    int row = 0;
    for (int t = 0; t < T; ++t) {
      Rng rng(seed, static_cast<std::uint64_t>(t), kStreamYear);
      for (int i = 0; i < n_per_year[t]; ++i, ++row) {
        year_of[row] = t;
        for (int k = 0; k < K; ++k) {
          const CovSpec& s = cov[k];
          switch (s.kind) {
            case CovSpec::Kind::kBernoulli:
              raw(row, k) = rng.uniform() < s.a ? 1.0 : 0.0;
              break;
            case CovSpec::Kind::kLogNormal:
              raw(row, k) = std::exp(rng.normal(s.a, s.b));
              break;
            case CovSpec::Kind::kTruncNormal:
              raw(row, k) = rng.truncated_normal(s.a, s.b, s.lo, s.hi);
              break;
            default:
              raw(row, k) = 0.0;  // filled below
          }
        }
      }
    }
  }
  for (int k = 0; k < K; ++k) {
    if (cov[k].kind == CovSpec::Kind::kProduct) {
      raw.col(k) = raw.col(cov[k].src1).cwiseProduct(raw.col(cov[k].src2));
    } else if (cov[k].kind == CovSpec::Kind::kSquare) {
      raw.col(k) = raw.col(cov[k].src1).array().square();
    }
  }

  // In-sample standardization with the same rule the design builder applies,
  // so the truth's coefficients live on the scale a fit estimates.
  gt.scaling.resize(K);
  Eigen::MatrixXd std_cols = raw;
  for (int k = 0; k < K; ++k) {
    bool binary = cov[k].kind == CovSpec::Kind::kBernoulli;
    if (binary) continue;
    double mean = raw.col(k).mean();
    double sd = std::sqrt((raw.col(k).array() - mean).square().sum() /
                          std::max(n - 1, 1));
    if (!(sd > 0)) {
      throw ConfigError("generate: generated column " + std::to_string(k) +
                        " is constant; cannot standardize");
    }
    gt.scaling[k] = {mean, sd};
    std_cols.col(k) = (raw.col(k).array() - mean) / sd;
  }

  // Scores, components, responses.
  const double y_hi = norm_icdf(1.0 - epsilon);
  LoanDataset ds;
  ds.determinant_names.assign(kDeterminantNames.begin(), kDeterminantNames.end());
  ds.binary_mask.assign(kDeterminantBinary.begin(), kDeterminantBinary.end());
  if (K != kNumDeterminants) {
    ds.determinant_names.resize(K);
    ds.binary_mask.resize(K);
    for (int k = 0; k < K; ++k) {
      ds.determinant_names[k] = "X" + std::to_string(k + 1);
      ds.binary_mask[k] = cov[k].kind == CovSpec::Kind::kBernoulli;
    }
  }
  ds.records.resize(n);
  gt.z.resize(n);
  gt.zstar.resize(n);
  Rng loan_rng(seed, 1, kStreamYear);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& beta =
        gt.S[year_of[i]] == 0 ? truth.beta0 : truth.beta1;
    double score = beta(0);
    for (int k = 0; k < K; ++k) score += beta(k + 1) * std_cols(i, k);
    score += loan_rng.normal();
    gt.z[i] = score;
    int j = interval_of(score, truth.c);
    gt.zstar[i] = j;
    double y = loan_rng.normal(truth.mu(j - 1), std::sqrt(truth.sigma2(j - 1)));
    double rr;
    if (y >= y_hi) {
      rr = 1.0;
    } else if (y <= -y_hi) {
      rr = 0.0;
    } else {
      rr = norm_cdf(y);
    }
    LoanRecord& rec = ds.records[i];
    rec.rr = rr;
    rec.year = first_year + year_of[i];
    rec.x.assign(K, 0.0);
    for (int k = 0; k < K; ++k) rec.x[k] = raw(i, k);
  }
  ds.validate();
  return {std::move(ds), std::move(gt)};
}

std::string ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json j;
  j["params"]["mu"] = vec_to_json(gt.params.mu);
  j["params"]["sigma2"] = vec_to_json(gt.params.sigma2);
  j["params"]["c"] = vec_to_json(gt.params.c);
  j["params"]["beta0"] = vec_to_json(gt.params.beta0);
  j["params"]["beta1"] = vec_to_json(gt.params.beta1);
  j["params"]["p"] = gt.params.p;
  j["params"]["q"] = gt.params.q;
  j["S"] = gt.S;
  j["zstar"] = gt.zstar;
  j["z"] = gt.z;
  nlohmann::json sc = nlohmann::json::array();
  for (const auto& s : gt.scaling) sc.push_back({{"mean", s.mean}, {"sd", s.sd}});
  j["scaling"] = sc;
  j["seed"] = gt.seed;
  j["epsilon"] = gt.epsilon;
  return j.dump(2);
}

GroundTruth ground_truth_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("ground truth JSON: ") + e.what());
  }
  GroundTruth gt;
  try {
    gt.params.mu = vec_from_json(j.at("params").at("mu"));
    gt.params.sigma2 = vec_from_json(j.at("params").at("sigma2"));
    gt.params.c = vec_from_json(j.at("params").at("c"));
    gt.params.beta0 = vec_from_json(j.at("params").at("beta0"));
    gt.params.beta1 = vec_from_json(j.at("params").at("beta1"));
    gt.params.p = j.at("params").at("p").get<double>();
    gt.params.q = j.at("params").at("q").get<double>();
    gt.S = j.at("S").get<std::vector<int>>();
    gt.zstar = j.at("zstar").get<std::vector<int>>();
    gt.z = j.at("z").get<std::vector<double>>();
    for (const auto& s : j.at("scaling")) {
      gt.scaling.push_back({s.at("mean").get<double>(), s.at("sd").get<double>()});
    }
    gt.seed = j.at("seed").get<std::uint64_t>();
    gt.epsilon = j.at("epsilon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("ground truth JSON: ") + e.what());
  }
  return gt;
}

Eigen::VectorXd enumerate_state_posterior(const Eigen::MatrixXd& year_logliks,
                                          double p, double q) {
  const int T = static_cast<int>(year_logliks.rows());
  if (T < 1) throw ConfigError("enumerate_state_posterior: T must be >= 1");
  if (T > 12) {
    throw ConfigError("enumerate_state_posterior: refusing T > 12 (2^T paths)");
  }
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1)) {
    throw ConfigError("enumerate_state_posterior: p, q must lie in [0,1]");
  }
  double pi1 = boundary_tolerant_pi1(p, q);
  auto safe_log = [](double x) { return x > 0 ? std::log(x) : -kInf; };
  const std::uint32_t paths = 1u << T;
  std::vector<double> logjoint(paths);
  double best = -kInf;
  for (std::uint32_t m = 0; m < paths; ++m) {
    int s_prev = m & 1u;
    double lp = safe_log(s_prev == 1 ? pi1 : 1.0 - pi1) + year_logliks(0, s_prev);
    for (int t = 1; t < T; ++t) {
      int s = (m >> t) & 1u;
      double trans = s_prev == 0 ? (s == 0 ? p : 1.0 - p)
                                 : (s == 1 ? q : 1.0 - q);
      lp += safe_log(trans) + year_logliks(t, s);
      s_prev = s;
    }
    logjoint[m] = lp;
    best = std::max(best, lp);
  }
  if (!std::isfinite(best)) {
    throw NumericError("enumerate_state_posterior: all paths have zero mass");
  }
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(T);
  double total = 0.0;
  for (std::uint32_t m = 0; m < paths; ++m) {
    double w = std::exp(logjoint[m] - best);
    total += w;
    for (int t = 0; t < T; ++t) {
      if ((m >> t) & 1u) marg(t) += w;
    }
  }
  return marg / total;
}

}  // namespace rrmix
