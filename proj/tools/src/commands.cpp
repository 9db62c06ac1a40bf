#include "ntz/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "ntz/cli/serialize.hpp"
#include "ntz/cli/svg.hpp"
#include "ntz/closed_form.hpp"
#include "ntz/error.hpp"
#include "ntz/io_format.hpp"

namespace ntz::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects output files and writes them together once the command has finished.
class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  void add_json(std::string name, const json& doc) { add(std::move(name), doc.dump(2) + "\n"); }

  void flush() const {
    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      const fs::path p = fs::path(dir_) / name;
      std::ofstream out(p, std::ios::binary);
      out << content;
      if (!out) throw std::runtime_error("cannot write " + p.string());
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

json cost_json(const CostModel& c) { return {{"c_mean", c.c_mean}, {"c_now", c.c_now}}; }

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double leading_order_width(const ForecastProfile& profile, double c, double k) {
  const double f_inf = std::abs(profile.f_inf());
  if (f_inf == 0.0) return 0.0;
  return std::abs(profile.rate(0.0)) / k * std::sqrt(2.0 * c / f_inf);
}

}  // namespace

CommandOutput run_solve(const Config& config, const std::string& out_dir) {
  const ForecastProfile profile = config.profile();
  const CostModel cost = config.cost();
  const double k = config.k();
  const double p0 = config.p0();
  const GridSettings g = config.grid(profile);
  cost.validate();

  OutputSet files(out_dir);
  CommandOutput out;
  try {
    // The plateau pays c_now to enter and c_mean to leave: an effective 2c of c_now + c_mean.
    const PlateauSolution sol = solve_plateau(profile, 0.5 * (cost.c_now + cost.c_mean), k);
    const NoTradeZone zone = ntz_bounds(profile, cost, k);
    const std::vector<double> grid = uniform_grid(g.dt, g.horizon);
    const PositionPath path = optimal_path(profile, p0, cost, k, grid);
    const UtilityBreakdown u = utility_direct(path, profile, cost, k, true);

    json doc = to_json(sol);
    doc["status"] = sol.no_trade() ? "no-trade" : "ok";
    doc["low"] = zone.low;
    doc["high"] = zone.high;
    doc["p0"] = p0;
    doc["initial_trade"] = initial_trade(p0, zone);
    doc["k"] = k;
    doc["cost"] = cost_json(cost);
    doc["grid"] = {{"dt", g.dt}, {"horizon", g.horizon}};
    doc["terminal_liquidation"] = true;
    doc["path_utility"] = to_json(u);
    out.summary = doc;

    std::ostringstream csv;
    write_path_csv(csv, path);
    files.add("path.csv", csv.str());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotConcave) throw;
    out.exit_code = kExitNotConcave;
    out.summary = {{"status", "not-concave"}, {"error", e.what()}};
  }
  files.add_json("solution.json", out.summary);
  files.flush();
  return out;
}

CommandOutput run_verify(const Config& config, const std::string& out_dir) {
  const ForecastProfile profile = config.profile();
  const CostModel cost = config.cost();
  const double k = config.k();
  const double p0 = config.p0();
  const OracleConfig oc = config.oracle(profile);
  const VerifySettings vs = config.verify();
  cost.validate();

  auto oracle_task = std::async(std::launch::async, [&] { return optimize_path(profile, p0, cost, k, oc); });
  std::future<NtzEstimate> ntz_task;
  if (vs.estimate_ntz) {
    NtzEstimateOptions opts;
    opts.scan_points = vs.scan_points;
    opts.resolution = vs.resolution;
    ntz_task = std::async(std::launch::async, [&, opts] { return estimate_ntz(profile, cost, k, oc, opts); });
  }

  json cf;
  std::optional<double> cf_landing, cf_utility;
  std::optional<NoTradeZone> cf_zone;
  try {
    const PlateauSolution sol = solve_plateau(profile, 0.5 * (cost.c_now + cost.c_mean), k);
    const NoTradeZone zone = ntz_bounds(profile, cost, k);
    const PositionPath path = optimal_path(profile, p0, cost, k, uniform_grid(oc.dt, oc.horizon));
    const UtilityBreakdown u = utility_direct(path, profile, cost, k, oc.terminal_liquidation);
    cf = to_json(sol);
    cf["status"] = sol.no_trade() ? "no-trade" : "ok";
    cf["low"] = zone.low;
    cf["high"] = zone.high;
    cf["first_trade"] = initial_trade(p0, zone);
    cf["landing"] = path.positions().front();
    cf["path_utility"] = to_json(u);
    cf_landing = path.positions().front();
    cf_utility = u.total;
    cf_zone = zone;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotConcave) throw;
    cf = {{"status", "not applicable"}, {"reason", e.what()}};
  }

  const OracleResult oracle = oracle_task.get();
  json oj{{"converged", oracle.converged},
          {"iterations", oracle.iterations},
          {"final_rel_change", oracle.final_rel_change},
          {"objective", oracle.objective},
          {"first_trade", oracle.first_trade()},
          {"landing", oracle.path.positions().front()},
          {"utility", to_json(oracle.utility)}};
  bool converged = oracle.converged;

  std::optional<NoTradeZone> oracle_zone;
  if (ntz_task.valid()) {
    try {
      const NtzEstimate est = ntz_task.get();
      oracle_zone = est.zone;
      oj["ntz"] = {{"low", est.zone.low},
                   {"high", est.zone.high},
                   {"degenerate", est.degenerate},
                   {"trade_epsilon", est.trade_epsilon},
                   {"probes", est.probes}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotConverged) throw;
      converged = false;
      oj["ntz"] = {{"status", "not-converged"}, {"error", e.what()}};
    }
  }

  json deltas = json::object(), checks = json::object();
  bool pass = true;
  auto check = [&](const char* name, double value, double tol) {
    deltas[name] = value;
    const bool ok = value <= tol;
    checks[name] = ok;
    pass = pass && ok;
  };
  if (cf_landing) {
    check("p_star", std::abs(oracle.path.positions().front() - *cf_landing), vs.position_tol);
    check("utility_rel", relative_gap(oracle.utility.total, *cf_utility), vs.utility_rel_tol);
    if (oracle_zone) {
      check("ntz_low", std::abs(oracle_zone->low - cf_zone->low), vs.position_tol);
      check("ntz_high", std::abs(oracle_zone->high - cf_zone->high), vs.position_tol);
    }
  }

  CommandOutput out;
  out.exit_code = !converged ? kExitNotConverged : (pass ? kExitOk : kExitToleranceBreach);
  out.summary = {{"status", !converged ? "not-converged" : (pass ? "pass" : "fail")},
                 {"closed_form", cf},
                 {"oracle", oj},
                 {"deltas", deltas},
                 {"checks", checks},
                 {"tolerances", {{"position", vs.position_tol}, {"utility_rel", vs.utility_rel_tol}}},
                 {"p0", p0},
                 {"k", k},
                 {"cost", cost_json(cost)},
                 {"oracle_config", to_json(oc)}};
  OutputSet files(out_dir);
  files.add_json("report.json", out.summary);
  files.flush();
  return out;
}

SweepResult compute_sweep(const ForecastProfile& profile, double k, const SweepSettings& settings,
                          const OracleConfig& oracle) {
  SweepResult result;
  std::vector<std::future<NtzEstimate>> tasks;
  for (double c : settings.cs) {
    const CostModel cost = CostModel::uniform(c);
    const NoTradeZone zone = ntz_bounds(profile, cost, k);
    SweepRow row;
    row.c = c;
    row.p_star = solve_plateau(profile, c, k).p_star;
    row.width_exact = zone.width();
    row.width_leading = leading_order_width(profile, c, k);
    row.saturated = std::abs(profile.f_inf()) <= 2.0 * c;
    result.rows.push_back(row);
    if (settings.oracle) {
      NtzEstimateOptions opts;
      opts.resolution = settings.resolution;
      tasks.push_back(std::async(std::launch::async,
                                 [&profile, k, &oracle, cost, opts] { return estimate_ntz(profile, cost, k, oracle, opts); }));
    }
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) result.rows[i].width_oracle = tasks[i].get().zone.width();

  std::vector<double> cs, exact, oracle_w;
  for (const auto& r : result.rows) {
    if (r.saturated || !(r.width_exact > 0.0)) continue;
    cs.push_back(r.c);
    exact.push_back(r.width_exact);
    if (r.width_oracle) oracle_w.push_back(*r.width_oracle);
  }
  if (cs.size() >= 3) {
    result.exact_fit = fit_scaling_exponent(cs, exact);
    if (oracle_w.size() == cs.size()) result.oracle_fit = fit_scaling_exponent(cs, oracle_w);
  }
  return result;
}

CommandOutput run_sweep(const Config& config, const std::string& out_dir, bool strict) {
  const ForecastProfile profile = config.profile();
  const double k = config.k();
  const SweepSettings ss = config.sweep();
  if (strict) {
    for (double c : ss.cs) {
      if (std::abs(profile.f_inf()) <= 2.0 * c) {
        throw ConfigError("sweep.c value " + format_double(c) + " is at or above f_inf / 2 (strict mode)");
      }
    }
  }
  const OracleConfig oc = ss.oracle ? config.oracle(profile) : OracleConfig{};
  const SweepResult r = compute_sweep(profile, k, ss, oc);

  std::ostringstream csv;
  csv << "c,p_star,width_exact,width_leading,width_oracle,saturated\n";
  std::vector<double> cs, exact, leading, oracle_c, oracle_w;
  for (const auto& row : r.rows) {
    csv << format_double(row.c) << ',' << format_double(row.p_star) << ',' << format_double(row.width_exact) << ','
        << format_double(row.width_leading) << ',' << (row.width_oracle ? format_double(*row.width_oracle) : "")
        << ',' << (row.saturated ? 1 : 0) << '\n';
    cs.push_back(row.c);
    exact.push_back(row.width_exact);
    leading.push_back(row.width_leading);
    if (row.width_oracle) {
      oracle_c.push_back(row.c);
      oracle_w.push_back(*row.width_oracle);
    }
  }

  SvgChart chart("No-trade zone width vs slippage", "slippage c", "zone width");
  chart.set_log_axes(true, true);
  chart.add_line("exact", cs, exact, "#1f77b4");
  chart.add_line("sqrt leading order", cs, leading, "#7f7f7f", true);
  if (!oracle_c.empty()) chart.add_points("oracle", oracle_c, oracle_w, "#d62728");

  auto fit_json = [](const std::optional<ScalingFit>& f) {
    return f ? json{{"slope", f->slope}, {"stderr", f->stderr_slope}, {"intercept", f->intercept}} : json(nullptr);
  };
  long saturated = 0;
  for (const auto& row : r.rows) saturated += row.saturated ? 1 : 0;

  CommandOutput out;
  out.summary = {{"status", "ok"},
                 {"fitted_slope", r.exact_fit ? json(r.exact_fit->slope) : json(nullptr)},
                 {"fit_stderr", r.exact_fit ? json(r.exact_fit->stderr_slope) : json(nullptr)},
                 {"exact_fit", fit_json(r.exact_fit)},
                 {"oracle_fit", fit_json(r.oracle_fit)},
                 {"points", r.rows.size()},
                 {"saturated", saturated},
                 {"k", k}};
  if (ss.oracle) out.summary["oracle_config"] = to_json(oc);

  OutputSet files(out_dir);
  files.add("sweep.csv", csv.str());
  files.add("sweep.svg", chart.render());
  files.add_json("report.json", out.summary);
  files.flush();
  return out;
}

CommandOutput run_simulate(const Config& config, const std::string& out_dir) {
  const ForecastProfile profile = config.profile();
  const CostModel cost = config.cost();
  const double k = config.k();
  const double p0 = config.p0();
  const ScenarioSettings sc = config.scenario();

  const SimulationRecord rec = run_simulation(sc.scenario, profile, p0, cost, k, sc.dt, sc.steps);

  std::ostringstream csv;
  write_simulation_csv(csv, rec);

  std::vector<double> t, lo, hi, pos;
  for (const auto& s : rec.steps) {
    t.push_back(s.t);
    lo.push_back(s.ntz_low);
    hi.push_back(s.ntz_high);
    pos.push_back(s.position);
  }
  SvgChart chart("Position driven by the no-trade zone", "time", "position");
  chart.add_band("no-trade zone", t, lo, hi, "#1f77b4");
  chart.add_line("position", t, pos, "#d62728");

  CommandOutput out;
  out.exit_code = rec.status == SimulationStatus::Ok ? kExitOk : kExitNotConcave;
  out.summary = {{"status", to_string(rec.status)},
                 {"steps_completed", rec.steps.size()},
                 {"steps", sc.steps},
                 {"dt", sc.dt},
                 {"seed", sc.scenario.seed},
                 {"totals", to_json(rec.totals)}};
  if (!rec.message.empty()) out.summary["message"] = rec.message;

  OutputSet files(out_dir);
  files.add("sim.csv", csv.str());
  files.add("sim.svg", chart.render());
  files.add_json("report.json", out.summary);
  files.flush();
  return out;
}

int dispatch(const std::string& command, const RunOptions& options, std::ostream& err) {
  try {
    const Config config = Config::load(options);
    CommandOutput out;
    if (command == "solve") {
      out = run_solve(config, options.out_dir);
    } else if (command == "verify") {
      out = run_verify(config, options.out_dir);
    } else if (command == "sweep") {
      out = run_sweep(config, options.out_dir, options.strict);
    } else if (command == "simulate") {
      out = run_simulate(config, options.out_dir);
    } else {
      err << "ntz: unknown command " << command << '\n';
      return kExitBadConfig;
    }
    if (out.exit_code != kExitOk) {
      err << "ntz " << command << ": status " << out.summary.value("status", std::string("error")) << '\n';
    }
    return out.exit_code;
  } catch (const ConfigError& e) {
    err << "ntz " << command << ": " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const Error& e) {
    err << "ntz " << command << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::NotConcave: return kExitNotConcave;
      case ErrorCode::NotConverged: return kExitNotConverged;
      default: return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "ntz " << command << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ntz::cli
