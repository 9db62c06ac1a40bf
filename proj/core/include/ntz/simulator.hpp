#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ntz/closed_form.hpp"
#include "ntz/forecast.hpp"
#include "ntz/utility.hpp"

namespace ntz {

/// Forecast override taking effect at time `t`. `gamma` only applies to rational
/// profiles; `c_now` optionally changes the immediate-trade cost from then on.
struct ScheduleEntry {
  double t = 0.0;
  double f_inf = 0.0;
  double gamma = 1.0;
  std::optional<double> c_now;
};

/// How the forecast is revised between steps.
///
/// Deterministic: scripted overrides. MeanReverting: an Euler step of
///   df_inf = rate (target - f_inf) dt + vol dW
/// drawn from Xoshiro256 seeded with `seed`; the curve shape is kept.
struct RevisionScenario {
  enum class Kind { Deterministic, MeanReverting };

  Kind kind = Kind::Deterministic;
  std::vector<ScheduleEntry> schedule;
  double rev_rate = 0.0;
  double rev_target = 0.0;
  double rev_vol = 0.0;
  std::uint64_t seed = 0;

  static RevisionScenario deterministic(std::vector<ScheduleEntry> schedule);
  static RevisionScenario mean_reverting(double rate, double target, double vol, std::uint64_t seed);
  void validate() const;
};

struct SimulationStep {
  double t = 0.0;
  double f_inf = 0.0;
  double ntz_low = 0.0;
  double ntz_high = 0.0;
  double position = 0.0;  // after this step's trade
  double trade = 0.0;
  double step_cost = 0.0;
};

struct SimulationTotals {
  double alpha = 0.0;     // sum f'(0) P dt
  double slippage = 0.0;  // sum c_now |trade|, the rate in force at execution
  double risk = 0.0;      // sum k P^2 dt
  long trade_count = 0;
  double turnover = 0.0;  // sum |trade|
};

enum class SimulationStatus { Ok, NotConcave };

struct SimulationRecord {
  std::vector<SimulationStep> steps;
  SimulationTotals totals;
  SimulationStatus status = SimulationStatus::Ok;
  std::string message;
};

/// The zone with roundtrip cost c_now + c_mean: ntz_bounds, exposed for per-step gauging.
NoTradeZone gauged_ntz(const ForecastProfile& profile, const CostModel& cost, double k);

/// Rolls the position forward: each step revises the forecast (from the second
/// step on), re-solves the gauged zone treating the current instant as t = 0,
/// and clamps the position into it. An unsupported profile shape stops the run
/// with a partial record and status NotConcave.
SimulationRecord run_simulation(const RevisionScenario& scenario, const ForecastProfile& initial, double p0,
                                const CostModel& cost, double k, double dt, long steps);

/// `t,f_inf,ntz_low,ntz_high,position,trade,step_cost`.
void write_simulation_csv(std::ostream& out, const SimulationRecord& record);

std::string to_string(SimulationStatus status);

}  // namespace ntz
