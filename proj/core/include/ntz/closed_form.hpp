#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "ntz/forecast.hpp"
#include "ntz/utility.hpp"

namespace ntz {

/// Plateau duration reported when the forecast never covers the roundtrip cost.
inline constexpr double kNoTradeTau = std::numeric_limits<double>::infinity();

/// Closed-form single-plateau solution for a concave forecast and P0 = 0.
struct PlateauSolution {
  double tau = 0.0;      // plateau duration, kNoTradeTau when no tangent exists
  double p_star = 0.0;   // plateau level (the initial trade target)
  double target0 = 0.0;  // cost-free target f'(0) / 2k
  double utility = 0.0;  // single-parameter utility at tau

  bool no_trade() const noexcept { return std::isinf(tau); }
};

/// Positions in [low, high] are not traded; anything outside moves to the nearest edge.
struct NoTradeZone {
  double low = 0.0;
  double high = 0.0;

  double width() const noexcept { return high - low; }
  bool contains(double p) const noexcept { return low <= p && p <= high; }
};

/// f'(t) / 2k.
double cost_free_target(const ForecastProfile& profile, double k, double t = 0.0);

/// Root of the tangent-intercept condition f(tau) - tau f'(tau) = 2c.
/// Throws NoTangent when |f_inf| <= 2c; returns 0 for c = 0.
double solve_plateau_time(const ForecastProfile& profile, double c);

/// tau, P* and the plateau utility. P* is computed twice, from f'(tau) and from
/// the inverse conjugate at 2c, and the two are required to agree. When no
/// tangent exists the solution is {kNoTradeTau, 0, target0, 0}.
PlateauSolution solve_plateau(const ForecastProfile& profile, double c, double k);

/// Utility of the path "jump to f'(tau)/2k at t = 0, hold until tau, then follow
/// the cost-free target", as a function of tau.
double plateau_utility(const ForecastProfile& profile, double tau, double c, double k);

/// Integral of f'(t)^2 over [tau, infinity).
double tail_rate_integral(const ForecastProfile& profile, double tau);

/// Zone [f^-1(c_now + c_mean) / 2k, f'(0) / 2k], with ^-1 the inverse conjugate.
/// Reduces to the 2c rule when c_now = c_mean. Mirrored for f_inf < 0.
NoTradeZone ntz_bounds(const ForecastProfile& profile, const CostModel& cost, double k);

/// Signed trade that moves p0 to the nearest zone boundary (0 inside the zone).
double initial_trade(double p0, const NoTradeZone& zone);

/// Optimal path on a time grid: the initial clamp trade, a plateau at the
/// post-trade level, then the cost-free curve once it descends to that level.
PositionPath optimal_path(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                          std::span<const double> grid);

/// Explicit P* for the rational profile: (gamma / 2k) (sqrt(f_inf) - sqrt(2c))^2, 0 when f_inf <= 2c.
double rational_pstar(double f_inf, double gamma, double c, double k);

struct NtzWidth {
  double exact = 0.0;
  double leading_order = 0.0;
};

/// Zone width for the rational profile: exact (gamma / k)(sqrt(2 c f_inf) - c) and the
/// square-root leading term (f'(0) / k) sqrt(2c / f_inf). Saturates at target0 once 2c >= f_inf.
NtzWidth ntz_width(double f_inf, double gamma, double c, double k);

}  // namespace ntz
