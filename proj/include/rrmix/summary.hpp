#pragma once

#include <string>
#include <vector>

#include "rrmix/gibbs.hpp"

namespace rrmix {

struct PosteriorSummary {
  double mean = 0.0;
  double hpd_lo = 0.0, hpd_hi = 0.0;
  double ess = 0.0;
  bool significant = false;  // HPD excludes 0 (coefficients only)
  bool flagged = false;      // degenerate trace (constant, never occupied, ...)
};

// Shortest window of ceil(mass*m) consecutive order statistics; ties go to
// the lowest left end. Needs at least 50 draws.
std::pair<double, double> hpd_interval(std::vector<double> draws,
                                       double mass = 0.95);

// Effective sample size by the initial-positive-sequence truncation of the
// autocorrelation sum, clipped to (0, m]. Needs at least 100 draws; a
// constant trace floors at 1.
double ess(const std::vector<double>& draws);

PosteriorSummary summarize_scalar(const std::vector<double>& draws,
                                  double mass = 0.95);

struct MixtureComponentRow {
  PosteriorSummary mu, sigma;  // sigma on the sd scale
  PosteriorSummary weight;
  double mean_rr = 0.0;        // posterior mean over occupied draws
  bool occupied = false;
};

struct MixtureReport {
  std::vector<MixtureComponentRow> components;
  // When set, mean_rr is Phi(posterior mean mu_j) instead of the average of
  // back-transformed allocated observations.
  bool mean_rr_from_mu = false;
};

MixtureReport mixture_report(const Chain& chain, double mass = 0.95,
                             bool mean_rr_from_mu = false);

struct CycleReport {
  std::vector<int> years;
  std::vector<double> prob_state1;  // per-year posterior mean of S_t
  PosteriorSummary p, q, steady;    // steady averaged per draw
};

// Dynamic chains only; a static chain raises ConfigError.
CycleReport cycle_report(const Chain& chain, double mass = 0.95);

struct CoefficientRow {
  std::string name;
  int state = 0;                   // 0/1; static chains report state 0 only
  PosteriorSummary summary;        // standardized scale
  double destandardized_mean = 0.0;
  char sign = ' ';                 // '+'/'-' when significant, blank otherwise
};

struct CoefficientReport {
  std::vector<CoefficientRow> rows;  // intercept first, per state
  double lambda2_mpm[2] = {0.0, 0.0};
};

CoefficientReport coefficient_report(const Chain& chain, double mass = 0.95);

// Emitters. CSV formats are stable column layouts; JSON mirrors the structs.
std::string mixture_report_csv(const MixtureReport& r);
std::string mixture_report_json(const MixtureReport& r);
std::string cycle_report_csv(const CycleReport& r);
std::string cycle_report_json(const CycleReport& r);
std::string cycle_series_tsv(const CycleReport& r);  // two-column plot file
std::string coefficient_report_csv(const CoefficientReport& r);
std::string coefficient_report_json(const CoefficientReport& r);

// ESS table across all stored scalar parameters.
std::string diagnostics_csv(const Chain& chain);

}  // namespace rrmix
