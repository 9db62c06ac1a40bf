#pragma once

#include <span>

namespace ntz::cli {

struct ScalingFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of log delta on log c. Needs at least 3 points, all positive.
ScalingFit fit_scaling_exponent(std::span<const double> cs, std::span<const double> deltas);

}  // namespace ntz::cli
