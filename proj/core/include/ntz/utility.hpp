#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ntz/forecast.hpp"

namespace ntz {

/// Proportional trading cost per unit notional. `c_now` applies to the
/// immediate (t = 0) trade, `c_mean` to every later trade.
struct CostModel {
  double c_mean = 0.0;
  double c_now = 0.0;

  static CostModel uniform(double c) { return {c, c}; }
  void validate() const;
};

struct Trade {
  double t = 0.0;
  double delta = 0.0;  // buys positive
};

/// Piecewise-constant position path. positions[i] is held on [times[i], times[i+1]);
/// the last sample is the terminal state at the horizon and is held for zero time.
class PositionPath {
 public:
  PositionPath(std::vector<double> times, std::vector<double> positions, double initial_position);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& positions() const noexcept { return positions_; }
  double initial_position() const noexcept { return initial_position_; }
  double final_position() const noexcept { return positions_.back(); }
  double horizon() const noexcept { return times_.back(); }
  std::size_t size() const noexcept { return times_.size(); }

  /// Every non-zero jump, including the t = 0 trade away from the initial position.
  std::vector<Trade> trades() const;

 private:
  std::vector<double> times_;
  std::vector<double> positions_;
  double initial_position_ = 0.0;
};

struct UtilityBreakdown {
  double alpha = 0.0;     // integral of f' P
  double slippage = 0.0;  // minus cost-weighted total variation, always <= 0
  double risk = 0.0;      // minus k times integral of P^2
  double total = 0.0;
};

/// 0, dt, 2 dt, ... up to the horizon (inclusive, rounded to whole steps).
std::vector<double> uniform_grid(double dt, double horizon);

/// Mean-variance utility integral of f' P - c|P'| - k P^2 over the path.
///
/// The alpha term uses the trapezoid rule for f' on each holding interval and
/// the risk term a left Riemann sum, both exact for the piecewise-constant
/// convention up to the quadrature of f'. With terminal_liquidation the
/// residual position is charged c_mean |P_final| for its eventual unwind.
UtilityBreakdown utility_direct(const PositionPath& path, const ForecastProfile& profile,
                                const CostModel& cost, double k, bool terminal_liquidation = true);

/// The same utility after integrating the alpha term by parts:
///   -sum over jumps dP * (F + c sign dP) - k integral P^2,
/// where F is the cumulative trapezoid integral of f' on the path grid (so the
/// two forms are algebraically identical). The dropped boundary term F(T) P_final
/// must be negligible unless boundary_correction adds it back.
double utility_by_parts(const PositionPath& path, const ForecastProfile& profile, const CostModel& cost,
                        double k, bool boundary_correction = false);

// `t,position` CSV; the initial position is not part of the schema.
void write_path_csv(std::ostream& out, const PositionPath& path);
PositionPath read_path_csv(std::istream& in, double initial_position);

}  // namespace ntz
