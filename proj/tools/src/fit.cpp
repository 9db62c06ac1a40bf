#include "ntz/cli/fit.hpp"

#include <cmath>
#include <vector>

#include "ntz/error.hpp"

namespace ntz::cli {

ScalingFit fit_scaling_exponent(std::span<const double> cs, std::span<const double> deltas) {
  if (cs.size() != deltas.size()) throw Error(ErrorCode::InvalidArgument, "cs and deltas differ in length");
  const std::size_t n = cs.size();
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "scaling fit needs at least 3 points");

  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cs[i] > 0.0) || !(deltas[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveInput, "scaling fit needs positive c and widths");
    }
    x[i] = std::log(cs[i]);
    y[i] = std::log(deltas[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidArgument, "scaling fit needs distinct c values");

  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.stderr_slope = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return fit;
}

}  // namespace ntz::cli
