#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ntz/cli/config.hpp"
#include "ntz/cli/fit.hpp"

namespace ntz::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitBadConfig = 2,
  kExitNotConcave = 3,
  kExitToleranceBreach = 4,
  kExitNotConverged = 5,
};

struct SweepRow {
  double c = 0.0;
  double p_star = 0.0;
  double width_exact = 0.0;
  double width_leading = 0.0;
  std::optional<double> width_oracle;
  bool saturated = false;  // c >= f_inf / 2: no tangent, the zone spans [0, target0]
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<ScalingFit> exact_fit;  // over unsaturated rows, when there are at least 3
  std::optional<ScalingFit> oracle_fit;
};

/// Zone widths over the cost grid; oracle estimates run concurrently, one task per cost.
SweepResult compute_sweep(const ForecastProfile& profile, double k, const SweepSettings& settings,
                          const OracleConfig& oracle);

struct CommandOutput {
  int exit_code = kExitOk;
  nlohmann::json summary;  // the JSON document the command writes
};

/// Each command reads the sections it needs and writes its files into out_dir.
///   solve:    solution.json, path.csv
///   verify:   report.json
///   sweep:    sweep.csv, sweep.svg, report.json
///   simulate: sim.csv, sim.svg, report.json
/// Errors other than tolerance breaches and non-convergence propagate as exceptions.
CommandOutput run_solve(const Config& config, const std::string& out_dir);
CommandOutput run_verify(const Config& config, const std::string& out_dir);
CommandOutput run_sweep(const Config& config, const std::string& out_dir, bool strict);
CommandOutput run_simulate(const Config& config, const std::string& out_dir);

/// Loads the config, runs `command` and maps failures to exit codes, printing diagnostics to err.
int dispatch(const std::string& command, const RunOptions& options, std::ostream& err);

}  // namespace ntz::cli
