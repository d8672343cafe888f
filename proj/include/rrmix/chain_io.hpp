#pragma once

#include <string>

#include "rrmix/gibbs.hpp"

namespace rrmix {

// Columnar binary chain file.
//
// Layout (little-endian):
//   magic   8 bytes  "RRMXCHN1"
//   u32     format version (1)
//   u8      model (0 static, 1 dynamic)
//   u8      store_latents
//   u8      loan_weighted_transitions
//   u8      has_pins
//   i32     n, T, K, J
//   u64     seed
//   i32     draws, burnin, thin, chains
//   f64     epsilon, fix_p, fix_q (pins zero when has_pins=0), cutpoint_cap
// The thread count deliberately stays out of the file: chains are
// thread-count invariant, so their files must be too (the manifest keeps it).
//   i32[T]  calendar years
//   K x (u32 len + bytes)  determinant names
//   u8[K]   binary mask
//   f64[2K] scaling (mean, sd per column)
//   i32     retained draw count m
//   m records, each:
//     f64[J] mu, f64[J] sigma2, f64[J-2] interior cut-points,
//     f64[K+1] beta0, f64[K+1] beta1,
//     f64 lambda0_2, lambda1_2, p, q, loglik,
//     f64[J] comp_weight, f64[J] comp_mean_rr,
//     u8[T] S                  (dynamic only)
//     f64[n] z, i32[n] zstar   (store_latents only)
void save_chain(const Chain& chain, const std::string& path);
Chain load_chain(const std::string& path);

// One row per retained draw, headers named after the parameters.
std::string chain_to_csv(const Chain& chain);

// Run manifest: resolved config, dimensions, wall time, provenance.
std::string run_manifest_json(const Chain& chain, double wall_seconds,
                              const std::string& dataset_path,
                              const std::string& chain_path);

}  // namespace rrmix
