#pragma once

namespace rrmix {

inline constexpr double kDefaultEpsilon = 1e-8;

// Probit transform of a recovery rate with boundary clamping: values at
// exactly 0 or 1 are replaced by epsilon / 1-epsilon before applying the
// standard normal quantile. Throws DomainError for rr outside [0,1] and
// ConfigError for epsilon outside (0, 0.5).
double clamp_and_transform(double rr, double epsilon = kDefaultEpsilon);

// Inverse of the transform: Phi(y), clamped to [0,1].
double inverse_transform(double y);

}  // namespace rrmix
