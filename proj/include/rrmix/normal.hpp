#pragma once

namespace rrmix {

// Standard normal cdf, Phi(x) = 0.5 * erfc(-x / sqrt(2)).
double norm_cdf(double x);

// Standard normal quantile. Acklam's rational approximation polished with
// Halley steps against erfc; relative error below 1e-13 for p in
// [1e-300, 1 - 1e-16]. Throws DomainError for p outside (0, 1).
double norm_icdf(double p);

// log Phi(x), stable in the far left tail (asymptotic expansion for x < -8).
double log_norm_cdf(double x);

// log phi(x), the standard normal log density.
double norm_logpdf(double x);

// log of the N(mu, sigma2) density at x.
double norm_logpdf(double x, double mu, double sigma2);

// log(Phi(hi) - Phi(lo)) for lo < hi, computed without catastrophic
// cancellation even when both endpoints sit deep in the same tail.
double log_norm_interval(double lo, double hi);

}  // namespace rrmix
