#include "rrmix/transform.hpp"

#include <algorithm>
#include <string>

#include "rrmix/errors.hpp"
#include "rrmix/normal.hpp"

namespace rrmix {

double clamp_and_transform(double rr, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ConfigError("clamp_and_transform: epsilon must lie in (0, 0.5), got " +
                      std::to_string(epsilon));
  }
  if (!(rr >= 0.0 && rr <= 1.0)) {
    throw DomainError("clamp_and_transform: recovery rate outside [0,1]: " +
                      std::to_string(rr));
  }
  if (rr == 0.0) return norm_icdf(epsilon);
  // Mirror the lower clamp instead of evaluating at 1 - epsilon, which would
  // re-round epsilon through the spacing of doubles near 1.
  if (rr == 1.0) return -norm_icdf(epsilon);
  return norm_icdf(rr);
}

double inverse_transform(double y) {
  return std::clamp(norm_cdf(y), 0.0, 1.0);
}

}  // namespace rrmix
