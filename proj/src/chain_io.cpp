#include "rrmix/chain_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rrmix/errors.hpp"

namespace rrmix {

namespace {

constexpr char kMagic[8] = {'R', 'R', 'M', 'X', 'C', 'H', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw IngestError("chain file: truncated");
  return v;
}

void put_vec(std::ostream& os, const Eigen::VectorXd& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd get_vec(std::istream& is, int len) {
  Eigen::VectorXd v(len);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(len) * sizeof(double));
  if (!is) throw IngestError("chain file: truncated");
  return v;
}

}  // namespace

void save_chain(const Chain& chain, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestError("cannot open for writing: " + path);
  const FitConfig& c = chain.config;
  const bool dynamic = c.model == ModelKind::kDynamic;

  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kVersion);
  put<std::uint8_t>(os, dynamic ? 1 : 0);
  put<std::uint8_t>(os, c.store_latents ? 1 : 0);
  put<std::uint8_t>(os, c.loan_weighted_transitions ? 1 : 0);
  put<std::uint8_t>(os, c.fix_p.has_value() ? 1 : 0);
  put<std::int32_t>(os, chain.n);
  put<std::int32_t>(os, chain.T);
  put<std::int32_t>(os, chain.K);
  put<std::int32_t>(os, chain.J);
  put<std::uint64_t>(os, c.seed);
  put<std::int32_t>(os, c.draws);
  put<std::int32_t>(os, c.burnin);
  put<std::int32_t>(os, c.thin);
  put<std::int32_t>(os, c.chains);
  put<double>(os, c.epsilon);
  put<double>(os, c.fix_p.value_or(0.0));
  put<double>(os, c.fix_q.value_or(0.0));
  put<double>(os, c.cutpoint_cap);
  for (int y : chain.years) put<std::int32_t>(os, y);
  for (const auto& name : chain.determinant_names) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (bool b : chain.binary_mask) put<std::uint8_t>(os, b ? 1 : 0);
  for (const auto& sc : chain.scaling) {
    put<double>(os, sc.mean);
    put<double>(os, sc.sd);
  }
  put<std::int32_t>(os, chain.retained());
  for (const auto& d : chain.draws) {
    put_vec(os, d.mu);
    put_vec(os, d.sigma2);
    put_vec(os, d.c_interior);
    put_vec(os, d.beta0);
    put_vec(os, d.beta1);
    put<double>(os, d.lambda0_2);
    put<double>(os, d.lambda1_2);
    put<double>(os, d.p);
    put<double>(os, d.q);
    put<double>(os, d.loglik);
    put_vec(os, d.comp_weight);
    put_vec(os, d.comp_mean_rr);
    if (dynamic) {
      os.write(reinterpret_cast<const char*>(d.S.data()),
               static_cast<std::streamsize>(d.S.size()));
    }
    if (c.store_latents) {
      put_vec(os, d.z);
      os.write(reinterpret_cast<const char*>(d.zstar.data()),
               static_cast<std::streamsize>(d.zstar.size() * sizeof(int)));
    }
  }
  if (!os) throw IngestError("chain file: write failed: " + path);
}

Chain load_chain(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestError("cannot open: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IngestError("chain file: bad magic: " + path);
  }
  if (get<std::uint32_t>(is) != kVersion) {
    throw IngestError("chain file: unsupported version: " + path);
  }
  Chain chain;
  FitConfig& c = chain.config;
  bool dynamic = get<std::uint8_t>(is) != 0;
  c.model = dynamic ? ModelKind::kDynamic : ModelKind::kStatic;
  c.store_latents = get<std::uint8_t>(is) != 0;
  c.loan_weighted_transitions = get<std::uint8_t>(is) != 0;
  bool has_pins = get<std::uint8_t>(is) != 0;
  chain.n = get<std::int32_t>(is);
  chain.T = get<std::int32_t>(is);
  chain.K = get<std::int32_t>(is);
  chain.J = get<std::int32_t>(is);
  c.seed = get<std::uint64_t>(is);
  c.draws = get<std::int32_t>(is);
  c.burnin = get<std::int32_t>(is);
  c.thin = get<std::int32_t>(is);
  c.chains = get<std::int32_t>(is);
  c.epsilon = get<double>(is);
  double fp = get<double>(is), fq = get<double>(is);
  if (has_pins) {
    c.fix_p = fp;
    c.fix_q = fq;
  }
  c.cutpoint_cap = get<double>(is);
  c.J = chain.J;
  if (chain.n < 0 || chain.T < 0 || chain.K < 0 || chain.J < 2) {
    throw IngestError("chain file: corrupt dimensions: " + path);
  }
  chain.years.resize(chain.T);
  for (int& y : chain.years) y = get<std::int32_t>(is);
  chain.determinant_names.resize(chain.K);
  for (auto& name : chain.determinant_names) {
    auto len = get<std::uint32_t>(is);
    if (len > 4096) throw IngestError("chain file: corrupt name length");
    name.resize(len);
    is.read(name.data(), len);
    if (!is) throw IngestError("chain file: truncated");
  }
  chain.binary_mask.resize(chain.K);
  for (int k = 0; k < chain.K; ++k) chain.binary_mask[k] = get<std::uint8_t>(is) != 0;
  chain.scaling.resize(chain.K);
  for (auto& sc : chain.scaling) {
    sc.mean = get<double>(is);
    sc.sd = get<double>(is);
  }
  int m = get<std::int32_t>(is);
  if (m < 0) throw IngestError("chain file: corrupt draw count");
  chain.draws.resize(m);
  for (auto& d : chain.draws) {
    d.mu = get_vec(is, chain.J);
    d.sigma2 = get_vec(is, chain.J);
    d.c_interior = get_vec(is, std::max(chain.J - 2, 0));
    d.beta0 = get_vec(is, chain.K + 1);
    d.beta1 = get_vec(is, chain.K + 1);
    d.lambda0_2 = get<double>(is);
    d.lambda1_2 = get<double>(is);
    d.p = get<double>(is);
    d.q = get<double>(is);
    d.loglik = get<double>(is);
    d.comp_weight = get_vec(is, chain.J);
    d.comp_mean_rr = get_vec(is, chain.J);
    if (dynamic) {
      d.S.resize(chain.T);
      is.read(reinterpret_cast<char*>(d.S.data()), chain.T);
      if (!is) throw IngestError("chain file: truncated");
    }
    if (c.store_latents) {
      d.z = get_vec(is, chain.n);
      d.zstar.resize(chain.n);
      is.read(reinterpret_cast<char*>(d.zstar.data()),
              static_cast<std::streamsize>(chain.n) * sizeof(int));
      if (!is) throw IngestError("chain file: truncated");
    }
  }
  return chain;
}

std::string chain_to_csv(const Chain& chain) {
  const bool dynamic = chain.config.model == ModelKind::kDynamic;
  std::ostringstream os;
  os.precision(17);
  os << "draw";
  for (int j = 1; j <= chain.J; ++j) os << ",mu_" << j;
  for (int j = 1; j <= chain.J; ++j) os << ",sigma2_" << j;
  for (int j = 2; j < chain.J; ++j) os << ",c_" << j;
  for (int k = 0; k <= chain.K; ++k) os << ",beta0_" << k;
  if (dynamic) {
    for (int k = 0; k <= chain.K; ++k) os << ",beta1_" << k;
  }
  os << ",lambda2_0";
  if (dynamic) os << ",lambda2_1,p,q";
  os << ",loglik";
  for (int j = 1; j <= chain.J; ++j) os << ",weight_" << j;
  for (int j = 1; j <= chain.J; ++j) os << ",mean_rr_" << j;
  if (dynamic) {
    for (int y : chain.years) os << ",S_" << y;
  }
  os << '\n';
  for (int g = 0; g < chain.retained(); ++g) {
    const ChainDraw& d = chain.draws[g];
    os << g;
    for (int j = 0; j < chain.J; ++j) os << ',' << d.mu(j);
    for (int j = 0; j < chain.J; ++j) os << ',' << d.sigma2(j);
    for (int j = 0; j < d.c_interior.size(); ++j) os << ',' << d.c_interior(j);
    for (int k = 0; k <= chain.K; ++k) os << ',' << d.beta0(k);
    if (dynamic) {
      for (int k = 0; k <= chain.K; ++k) os << ',' << d.beta1(k);
    }
    os << ',' << d.lambda0_2;
    if (dynamic) os << ',' << d.lambda1_2 << ',' << d.p << ',' << d.q;
    os << ',' << d.loglik;
    for (int j = 0; j < chain.J; ++j) os << ',' << d.comp_weight(j);
    for (int j = 0; j < chain.J; ++j) os << ',' << d.comp_mean_rr(j);
    if (dynamic) {
      for (int t = 0; t < chain.T; ++t) os << ',' << int(d.S[t]);
    }
    os << '\n';
  }
  return os.str();
}

std::string run_manifest_json(const Chain& chain, double wall_seconds,
                              const std::string& dataset_path,
                              const std::string& chain_path) {
  const FitConfig& c = chain.config;
  nlohmann::json j;
  j["config"] = {
      {"model", c.model == ModelKind::kDynamic ? "dynamic" : "static"},
      {"draws", c.draws},
      {"burnin", c.burnin},
      {"thin", c.thin},
      {"seed", c.seed},
      {"J", c.J},
      {"epsilon", c.epsilon},
      {"loan_weighted_transitions", c.loan_weighted_transitions},
      {"chains", c.chains},
      {"threads", c.threads},
      {"store_latents", c.store_latents}};
  if (c.fix_p) {
    j["config"]["fix_p"] = *c.fix_p;
    j["config"]["fix_q"] = *c.fix_q;
  }
  if (std::isfinite(c.cutpoint_cap)) j["config"]["cutpoint_cap"] = c.cutpoint_cap;
  j["dimensions"] = {{"n", chain.n}, {"T", chain.T}, {"K", chain.K}, {"J", chain.J}};
  j["retained_draws"] = chain.retained();
  j["wall_seconds"] = wall_seconds;
  j["dataset"] = dataset_path;
  j["chain_file"] = chain_path;
  j["invariants_checked"] = true;
  return j.dump(2);
}

}  // namespace rrmix
