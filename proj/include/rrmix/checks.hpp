#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrmix/gibbs.hpp"

namespace rrmix {

struct CheckResult {
  std::string name;
  bool pass = false;
  double statistic = 0.0;  // KS sqrt(n)D, chi-square p-value, |z|, max error
  std::string detail;
};

// Goodness of fit for the nine conditional draw operations: 1e5 draws at
// fixed conditioning values against the stated density, significance 1e-3.
// Distribution functions come from Boost.Math, an implementation independent
// of the library's own samplers.
std::vector<CheckResult> gof_suite(std::uint64_t seed = 1);

// FFBS against exhaustive path enumeration on 25 random small instances:
// smoothed marginals to 1e-12, backward-sampling frequencies to 0.01 over
// 1e5 sweeps.
std::vector<CheckResult> ffbs_suite(std::uint64_t seed = 1);

// Geweke joint-distribution test at desk scale (n=200, T=10, K=3, J=3):
// marginal-conditional prior draws vs the successive-conditional chain
// (Gibbs sweep + data regeneration), 12 test functions, |z| < 4.
std::vector<CheckResult> geweke_suite(ModelKind mode, std::uint64_t seed = 1,
                                      int sweeps = 40000);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace rrmix
