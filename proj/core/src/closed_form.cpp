#include "ntz/closed_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ntz/error.hpp"
#include "ntz/roots.hpp"

namespace ntz {

namespace {

void check_risk(double k) {
  if (!(k > 0.0)) throw Error(ErrorCode::NonPositiveRisk, "risk aversion k must be positive");
}

void check_cost(double c) {
  if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "slippage cost must be non-negative");
}

// Closed-form machinery works on f_inf >= 0; negative forecasts are mirrored.
ForecastProfile positive_side(const ForecastProfile& profile) {
  ForecastProfile p = profile.orientation() < 0.0 ? profile.mirrored() : profile;
  if (!p.is_concave()) throw Error(ErrorCode::NotConcave, "closed-form solution needs a concave profile");
  return p;
}

double tangent_intercept(const ForecastProfile& p, double t) { return p.value(t) - t * p.rate(t); }

// Time at which the descending cost-free target f'(t) / 2k falls to `level` (> 0).
double join_time(const ForecastProfile& p, double level, double k) {
  auto above = [&](double t) { return p.rate(t) / (2.0 * k) - level; };
  if (above(0.0) <= 0.0) return 0.0;
  double hi;
  if (p.kind() == ForecastProfile::Kind::Tabulated) {
    hi = p.knots().back().t;
  } else {
    hi = expand_bracket([&](double t) { return above(t) < 0.0; }, p.characteristic_time());
  }
  return find_root(above, 0.0, hi, 1e-13 * std::max(1.0, hi)).x;
}

}  // namespace

double cost_free_target(const ForecastProfile& profile, double k, double t) {
  check_risk(k);
  return profile.rate(t) / (2.0 * k);
}

double solve_plateau_time(const ForecastProfile& profile, double c) {
  check_cost(c);
  const ForecastProfile p = positive_side(profile);
  if (c == 0.0) return 0.0;
  if (p.f_inf() <= 2.0 * c) {
    throw Error(ErrorCode::NoTangent, "f_inf <= 2c: no tangent exists and it is best not to trade");
  }
  // g(tau) = f - tau f' rises monotonically from 0 to f_inf on a concave curve.
  auto residual = [&](double t) { return tangent_intercept(p, t) - 2.0 * c; };
  double hi;
  if (p.kind() == ForecastProfile::Kind::Tabulated) {
    hi = p.knots().back().t;
  } else {
    hi = expand_bracket([&](double t) { return residual(t) > 0.0; }, p.characteristic_time());
  }
  return find_root(residual, 0.0, hi, 1e-14 * std::max(1.0, hi)).x;
}

double tail_rate_integral(const ForecastProfile& profile, double tau) {
  if (profile.kind() == ForecastProfile::Kind::Rational) {
    const double u = 1.0 + profile.gamma() * tau;
    return profile.f_inf() * profile.f_inf() * profile.gamma() / (3.0 * u * u * u);
  }
  // f'^2 is a quartic on every knot interval, so 3-point Gauss-Legendre is exact.
  static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const auto knots = profile.knots();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    const double a = std::max(knots[j].t, tau);
    const double b = knots[j + 1].t;
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double r = profile.rate(mid + half * nodes[q]);
      sum += weights[q] * half * r * r;
    }
  }
  return sum;
}

double plateau_utility(const ForecastProfile& profile, double tau, double c, double k) {
  check_risk(k);
  check_cost(c);
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveTau, "plateau duration must be positive");
  const ForecastProfile p = positive_side(profile);
  const double f = p.value(tau);
  const double r = p.rate(tau);
  return (f - 2.0 * c) * r / (2.0 * k) - tau * r * r / (4.0 * k) + tail_rate_integral(p, tau) / (4.0 * k);
}

PlateauSolution solve_plateau(const ForecastProfile& profile, double c, double k) {
  check_risk(k);
  check_cost(c);
  const ForecastProfile p = positive_side(profile);
  const double sign = profile.orientation();

  PlateauSolution sol;
  sol.target0 = p.rate(0.0) / (2.0 * k);
  if (c == 0.0) {
    sol.tau = 0.0;
    sol.p_star = sol.target0;
    sol.utility = tail_rate_integral(p, 0.0) / (4.0 * k);
  } else if (p.f_inf() <= 2.0 * c) {
    sol.tau = kNoTradeTau;
    sol.p_star = 0.0;
    sol.utility = 0.0;
  } else {
    sol.tau = solve_plateau_time(p, c);
    const double via_rate = p.rate(sol.tau) / (2.0 * k);
    const double via_conjugate = inverse_legendre(p, 2.0 * c) / (2.0 * k);
    if (std::abs(via_rate - via_conjugate) > 1e-9 * std::max(1.0, sol.target0)) {
      throw std::logic_error("P* from f'(tau) and from the inverse conjugate disagree: " +
                             std::to_string(via_rate) + " vs " + std::to_string(via_conjugate));
    }
    sol.p_star = via_rate;
    sol.utility = plateau_utility(p, sol.tau, c, k);
  }
  sol.p_star *= sign;
  sol.target0 *= sign;
  return sol;
}

NoTradeZone ntz_bounds(const ForecastProfile& profile, const CostModel& cost, double k) {
  check_risk(k);
  cost.validate();
  const ForecastProfile p = positive_side(profile);
  const double roundtrip = cost.c_now + cost.c_mean;

  NoTradeZone zone;
  zone.high = p.rate(0.0) / (2.0 * k);
  if (roundtrip == 0.0) {
    zone.low = zone.high;
  } else if (p.f_inf() <= roundtrip) {
    zone.low = 0.0;
  } else {
    zone.low = inverse_legendre(p, roundtrip) / (2.0 * k);
  }
  if (profile.orientation() < 0.0) return {-zone.high, -zone.low};
  return zone;
}

double initial_trade(double p0, const NoTradeZone& zone) {
  if (p0 < zone.low) return zone.low - p0;
  if (p0 > zone.high) return zone.high - p0;
  return 0.0;
}

PositionPath optimal_path(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                          std::span<const double> grid) {
  check_risk(k);
  cost.validate();
  if (grid.empty()) throw Error(ErrorCode::MismatchedGrid, "path grid is empty");
  const ForecastProfile p = positive_side(profile);
  const double sign = profile.orientation();
  const double q0 = sign * p0;

  const NoTradeZone zone = ntz_bounds(p, cost, k);
  const double hold = q0 + initial_trade(q0, zone);

  double t_join;
  if (hold >= zone.high) {
    t_join = 0.0;
  } else if (hold <= 0.0) {
    t_join = kNoTradeTau;
  } else if (hold == zone.low && cost.c_now == cost.c_mean && cost.c_mean > 0.0) {
    t_join = solve_plateau_time(p, cost.c_mean);
  } else {
    t_join = join_time(p, hold, k);
  }

  std::vector<double> positions(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = grid[i] < t_join ? hold : p.rate(grid[i]) / (2.0 * k);
    positions[i] = sign * q;
  }
  return PositionPath(std::vector<double>(grid.begin(), grid.end()), std::move(positions), p0);
}

double rational_pstar(double f_inf, double gamma, double c, double k) {
  check_risk(k);
  check_cost(c);
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  const double a = std::abs(f_inf);
  if (a <= 2.0 * c) return 0.0;
  const double root_gap = std::sqrt(a) - std::sqrt(2.0 * c);
  const double p = gamma / (2.0 * k) * root_gap * root_gap;
  return f_inf < 0.0 ? -p : p;
}

NtzWidth ntz_width(double f_inf, double gamma, double c, double k) {
  check_risk(k);
  check_cost(c);
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  const double a = std::abs(f_inf);
  if (a == 0.0 || c == 0.0) return {0.0, 0.0};
  const double rate0 = a * gamma;
  NtzWidth w;
  w.leading_order = rate0 / k * std::sqrt(2.0 * c / a);
  w.exact = 2.0 * c < a ? gamma / k * (std::sqrt(2.0 * c * a) - c) : rate0 / (2.0 * k);
  return w;
}

}  // namespace ntz
