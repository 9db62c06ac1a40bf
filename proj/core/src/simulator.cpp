#include "ntz/simulator.hpp"

#include <cmath>
#include <ostream>

#include "ntz/error.hpp"
#include "ntz/io_format.hpp"
#include "ntz/rng.hpp"

namespace ntz {

RevisionScenario RevisionScenario::deterministic(std::vector<ScheduleEntry> schedule) {
  RevisionScenario s;
  s.kind = Kind::Deterministic;
  s.schedule = std::move(schedule);
  s.validate();
  return s;
}

RevisionScenario RevisionScenario::mean_reverting(double rate, double target, double vol, std::uint64_t seed) {
  RevisionScenario s;
  s.kind = Kind::MeanReverting;
  s.rev_rate = rate;
  s.rev_target = target;
  s.rev_vol = vol;
  s.seed = seed;
  s.validate();
  return s;
}

void RevisionScenario::validate() const {
  if (!(rev_rate >= 0.0) || !(rev_vol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "revision rate and volatility must be non-negative");
  }
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].t < schedule[i - 1].t) {
      throw Error(ErrorCode::InvalidArgument, "schedule times must be non-decreasing");
    }
  }
  for (const auto& e : schedule) {
    if (e.c_now && !(*e.c_now >= 0.0)) throw Error(ErrorCode::InvalidArgument, "schedule c_now must be >= 0");
  }
}

NoTradeZone gauged_ntz(const ForecastProfile& profile, const CostModel& cost, double k) {
  return ntz_bounds(profile, cost, k);
}

SimulationRecord run_simulation(const RevisionScenario& scenario, const ForecastProfile& initial, double p0,
                                const CostModel& cost, double k, double dt, long steps) {
  scenario.validate();
  cost.validate();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation dt must be positive");
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "simulation needs at least one step");
  if (!(k > 0.0)) throw Error(ErrorCode::NonPositiveRisk, "risk aversion k must be positive");

  SimulationRecord rec;
  rec.steps.reserve(static_cast<std::size_t>(steps));
  ForecastProfile profile = initial;
  CostModel step_cost_model = cost;
  double position = p0;
  Xoshiro256 rng(scenario.seed);
  std::size_t next_entry = 0;

  for (long n = 0; n < steps; ++n) {
    const double t0 = static_cast<double>(n) * dt;

    if (scenario.kind == RevisionScenario::Kind::Deterministic) {
      while (next_entry < scenario.schedule.size() && scenario.schedule[next_entry].t <= t0) {
        const auto& e = scenario.schedule[next_entry++];
        profile = profile.kind() == ForecastProfile::Kind::Rational ? ForecastProfile::rational(e.f_inf, e.gamma)
                                                                    : profile.with_f_inf(e.f_inf);
        if (e.c_now) step_cost_model.c_now = *e.c_now;
      }
    } else if (n > 0) {
      const double f = profile.f_inf();
      const double revised = f + scenario.rev_rate * (scenario.rev_target - f) * dt +
                             scenario.rev_vol * std::sqrt(dt) * rng.normal();
      profile = profile.with_f_inf(revised);
    }

    NoTradeZone zone;
    try {
      zone = gauged_ntz(profile, step_cost_model, k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotConcave) throw;
      rec.status = SimulationStatus::NotConcave;
      rec.message = "step " + std::to_string(n) + ": " + e.what();
      break;
    }

    SimulationStep step;
    step.t = t0;
    step.f_inf = profile.f_inf();
    step.ntz_low = zone.low;
    step.ntz_high = zone.high;
    step.trade = initial_trade(position, zone);
    position += step.trade;
    step.position = position;
    step.step_cost = step_cost_model.c_now * std::abs(step.trade);

    auto& tot = rec.totals;
    tot.slippage += step.step_cost;
    tot.turnover += std::abs(step.trade);
    if (step.trade != 0.0) ++tot.trade_count;
    tot.alpha += profile.rate(0.0) * position * dt;
    tot.risk += k * position * position * dt;
    rec.steps.push_back(step);
  }
  return rec;
}

void write_simulation_csv(std::ostream& out, const SimulationRecord& record) {
  out << "t,f_inf,ntz_low,ntz_high,position,trade,step_cost\n";
  for (const auto& s : record.steps) {
    out << format_double(s.t) << ',' << format_double(s.f_inf) << ',' << format_double(s.ntz_low) << ','
        << format_double(s.ntz_high) << ',' << format_double(s.position) << ',' << format_double(s.trade) << ','
        << format_double(s.step_cost) << '\n';
  }
}

std::string to_string(SimulationStatus status) {
  return status == SimulationStatus::Ok ? "ok" : "not-concave";
}

}  // namespace ntz
