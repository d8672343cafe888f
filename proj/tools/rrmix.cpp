#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrmix/chain_io.hpp"
#include "rrmix/checks.hpp"
#include "rrmix/data.hpp"
#include "rrmix/errors.hpp"
#include "rrmix/gibbs.hpp"
#include "rrmix/summary.hpp"
#include "rrmix/synthgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericError = 3;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw rrmix::IngestError("cannot open for writing: " + path);
  os << content;
  if (!os) throw rrmix::IngestError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw rrmix::IngestError("cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Defaults < config file < environment < flags.
struct FitOptions {
  std::string dataset, config_path;
  std::string model = "dynamic";
  rrmix::FitConfig cfg;
  std::string out = "chain.bin";
  std::string manifest;
  bool csv = false;
  double fix_p = -1.0, fix_q = -1.0;
};

void apply_config_file(FitOptions& o) {
  if (o.config_path.empty()) return;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(o.config_path));
  } catch (const nlohmann::json::exception& e) {
    throw rrmix::ConfigError(std::string("config file: ") + e.what());
  }
  if (j.contains("model")) o.model = j["model"].get<std::string>();
  if (j.contains("draws")) o.cfg.draws = j["draws"].get<int>();
  if (j.contains("burnin")) o.cfg.burnin = j["burnin"].get<int>();
  if (j.contains("thin")) o.cfg.thin = j["thin"].get<int>();
  if (j.contains("seed")) o.cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("J")) o.cfg.J = j["J"].get<int>();
  if (j.contains("epsilon")) o.cfg.epsilon = j["epsilon"].get<double>();
  if (j.contains("loan_weighted_transitions")) {
    o.cfg.loan_weighted_transitions = j["loan_weighted_transitions"].get<bool>();
  }
  if (j.contains("threads")) o.cfg.threads = j["threads"].get<int>();
  if (j.contains("store_latents")) o.cfg.store_latents = j["store_latents"].get<bool>();
}

void apply_env(rrmix::FitConfig& cfg) {
  if (const char* s = std::getenv("RRMIX_SEED")) {
    cfg.seed = std::strtoull(s, nullptr, 10);
  }
  if (const char* s = std::getenv("RRMIX_THREADS")) {
    cfg.threads = std::atoi(s);
  }
}

int cmd_simulate(int n, int years, std::uint64_t seed, const std::string& out,
                 std::string truth_out, double intercept_gap, double epsilon,
                 int first_year) {
  if (years < 1) throw rrmix::ConfigError("simulate: --years must be >= 1");
  if (n < 1) throw rrmix::ConfigError("simulate: --n must be >= 1");
  if (truth_out.empty()) truth_out = out + ".truth.json";
  std::vector<int> per_year(years, n / years);
  for (int t = 0; t < n % years; ++t) ++per_year[t];
  rrmix::GenTruth truth = rrmix::default_gen_truth(4, rrmix::kNumDeterminants,
                                                   intercept_gap);
  auto [ds, gt] = rrmix::generate(truth, per_year, rrmix::table1_preset(), seed,
                                  first_year, epsilon);
  rrmix::save_dataset(ds, out);
  write_file(truth_out, rrmix::ground_truth_to_json(gt));
  int good_years = 0;
  for (int s : gt.S) good_years += s;
  std::cout << "wrote " << ds.n() << " loans over " << years << " years to "
            << out << "\n"
            << "ground truth in " << truth_out << " (" << good_years
            << " good-state years, seed " << seed << ")\n";
  return kExitOk;
}

int cmd_fit(FitOptions& o) {
  o.cfg.model = o.model == "static" ? rrmix::ModelKind::kStatic
                                    : rrmix::ModelKind::kDynamic;
  if (o.model != "static" && o.model != "dynamic") {
    throw rrmix::ConfigError("fit: --model must be static or dynamic");
  }
  if ((o.fix_p >= 0) != (o.fix_q >= 0)) {
    throw rrmix::ConfigError("fit: --fix-p and --fix-q must be given together");
  }
  if (o.fix_p >= 0) {
    o.cfg.fix_p = o.fix_p;
    o.cfg.fix_q = o.fix_q;
  }
  if (o.manifest.empty()) o.manifest = o.out + ".manifest.json";
  rrmix::LoanDataset ds = rrmix::load_dataset(o.dataset);
  auto t0 = std::chrono::steady_clock::now();
  rrmix::Chain chain = rrmix::fit(ds, o.cfg);
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  rrmix::save_chain(chain, o.out);
  if (o.csv) write_file(o.out + ".csv", rrmix::chain_to_csv(chain));
  write_file(o.manifest,
             rrmix::run_manifest_json(chain, wall, o.dataset, o.out));
  std::cout << "retained " << chain.retained() << " draws in " << wall
            << " s; chain in " << o.out << ", manifest in " << o.manifest
            << "\n";
  return kExitOk;
}

int cmd_summarize(const std::string& chain_path, double mass,
                  const std::string& out_dir, bool mean_rr_from_mu,
                  bool force_cycle) {
  rrmix::Chain chain = rrmix::load_chain(chain_path);
  bool dynamic = chain.config.model == rrmix::ModelKind::kDynamic;
  if (force_cycle && !dynamic) {
    throw rrmix::ConfigError("summarize: --cycle requested on a static chain");
  }
  std::string prefix;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    prefix = out_dir + "/";
  }

  rrmix::MixtureReport mix = rrmix::mixture_report(chain, mass, mean_rr_from_mu);
  write_file(prefix + "mixture.csv", rrmix::mixture_report_csv(mix));
  write_file(prefix + "mixture.json", rrmix::mixture_report_json(mix));

  rrmix::CoefficientReport coef = rrmix::coefficient_report(chain, mass);
  write_file(prefix + "coefficients.csv", rrmix::coefficient_report_csv(coef));
  write_file(prefix + "coefficients.json", rrmix::coefficient_report_json(coef));

  if (dynamic) {
    rrmix::CycleReport cyc = rrmix::cycle_report(chain, mass);
    write_file(prefix + "cycle.csv", rrmix::cycle_report_csv(cyc));
    write_file(prefix + "cycle.json", rrmix::cycle_report_json(cyc));
    write_file(prefix + "cycle_series.tsv", rrmix::cycle_series_tsv(cyc));
  }
  write_file(prefix + "diagnostics.csv", rrmix::diagnostics_csv(chain));
  std::cout << "reports written to " << (out_dir.empty() ? "." : out_dir)
            << " (" << (dynamic ? "dynamic" : "static") << " chain, "
            << chain.retained() << " draws)\n";
  return kExitOk;
}

int cmd_check(const std::string& suite, std::uint64_t seed, int sweeps) {
  std::vector<rrmix::CheckResult> results;
  auto append = [&](std::vector<rrmix::CheckResult> r) {
    results.insert(results.end(), r.begin(), r.end());
  };
  if (suite == "all" || suite == "gof") append(rrmix::gof_suite(seed));
  if (suite == "all" || suite == "ffbs") append(rrmix::ffbs_suite(seed));
  if (suite == "all" || suite == "geweke") {
    append(rrmix::geweke_suite(rrmix::ModelKind::kStatic, seed, sweeps));
    append(rrmix::geweke_suite(rrmix::ModelKind::kDynamic, seed, sweeps));
  }
  if (results.empty()) {
    throw rrmix::ConfigError("check: unknown suite '" + suite +
                             "' (all, gof, ffbs, geweke)");
  }
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  " << r.detail
              << "\n";
    ok = ok && r.pass;
  }
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mixture model of bank-loan recovery rates with a "
               "Markov-switching credit cycle"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  int sim_n = 1611, sim_years = 29, sim_first_year = 1987;
  std::uint64_t sim_seed = 1;
  double sim_gap = 1.5, sim_eps = rrmix::kDefaultEpsilon;
  std::string sim_out = "synthetic.csv", sim_truth;
  std::string sim_preset = "table1";
  sim->add_option("--preset", sim_preset, "covariate preset (table1)");
  sim->add_option("--n", sim_n, "total loans");
  sim->add_option("--years", sim_years, "number of default years");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "dataset CSV path");
  sim->add_option("--truth-out", sim_truth, "ground truth JSON path");
  sim->add_option("--intercept-gap", sim_gap, "state intercept separation");
  sim->add_option("--epsilon", sim_eps, "boundary clamp");
  sim->add_option("--first-year", sim_first_year, "first calendar year");

  // fit
  auto* fitc = app.add_subcommand("fit", "run the Gibbs sampler");
  FitOptions fo;
  fitc->add_option("dataset", fo.dataset, "loan CSV")->required();
  fitc->add_option("--config", fo.config_path, "JSON config file");
  fitc->add_option("--model", fo.model, "static or dynamic");
  fitc->add_option("--draws", fo.cfg.draws, "retained draws");
  fitc->add_option("--burnin", fo.cfg.burnin, "burn-in sweeps");
  fitc->add_option("--thin", fo.cfg.thin, "thinning interval");
  fitc->add_option("--seed", fo.cfg.seed, "RNG seed");
  fitc->add_option("--J", fo.cfg.J, "mixture components");
  fitc->add_option("--epsilon", fo.cfg.epsilon, "boundary clamp");
  fitc->add_flag("--loan-weighted-transitions", fo.cfg.loan_weighted_transitions,
                 "weight transition counts by destination-year loans");
  fitc->add_option("--threads", fo.cfg.threads, "threads for the loan sweep");
  fitc->add_flag("--store-latents", fo.cfg.store_latents,
                 "store z and z* traces");
  fitc->add_option("--out", fo.out, "chain file path");
  fitc->add_option("--manifest", fo.manifest, "manifest JSON path");
  fitc->add_flag("--csv", fo.csv, "also export the chain as CSV");
  fitc->add_option("--fix-p", fo.fix_p, "pin p (testing)");
  fitc->add_option("--fix-q", fo.fix_q, "pin q (testing)");

  // summarize
  auto* sum = app.add_subcommand("summarize", "posterior reports from a chain");
  std::string sum_chain, sum_dir;
  double sum_mass = 0.95;
  bool sum_mu_rr = false, sum_cycle = false;
  sum->add_option("chain", sum_chain, "chain file")->required();
  sum->add_option("--hpd", sum_mass, "HPD mass");
  sum->add_option("--out-dir", sum_dir, "output directory (default cwd)");
  sum->add_flag("--mean-rr-from-mu", sum_mu_rr,
                "mean RR as Phi(posterior mean mu_j)");
  sum->add_flag("--cycle", sum_cycle, "require the credit-cycle report");

  // check
  auto* chk = app.add_subcommand("check", "run the verification suites");
  std::string chk_suite = "all";
  std::uint64_t chk_seed = 1;
  int chk_sweeps = 40000;
  chk->add_option("--suite", chk_suite, "all, gof, ffbs, or geweke");
  chk->add_option("--seed", chk_seed, "RNG seed");
  chk->add_option("--sweeps", chk_sweeps, "Geweke sweeps per simulator");

  // Precedence: parse the config file first so flags can override it, with
  // environment variables in between.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") fo.config_path = argv[i + 1];
  }
  try {
    apply_config_file(fo);
    apply_env(fo.cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (sim->parsed()) {
      if (sim_preset != "table1") {
        throw rrmix::ConfigError("simulate: unknown preset '" + sim_preset + "'");
      }
      return cmd_simulate(sim_n, sim_years, sim_seed, sim_out, sim_truth,
                          sim_gap, sim_eps, sim_first_year);
    }
    if (fitc->parsed()) return cmd_fit(fo);
    if (sum->parsed()) {
      return cmd_summarize(sum_chain, sum_mass, sum_dir, sum_mu_rr, sum_cycle);
    }
    if (chk->parsed()) return cmd_check(chk_suite, chk_seed, chk_sweeps);
  } catch (const rrmix::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
