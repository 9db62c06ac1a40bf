#include <iostream>

#include "CLI11.hpp"
#include "ntz/cli/commands.hpp"

namespace {

constexpr const char* kUnits =
    "Units: returns are dimensionless, time is in days, positions are notional units,\n"
    "slippage c is per unit notional traded, risk aversion k is per notional^2 per day.\n"
    "Exit codes: 0 ok, 2 malformed config, 3 unsupported (non-concave) profile,\n"
    "4 verification tolerance breach, 5 oracle did not converge.";

void add_common(CLI::App* cmd, ntz::cli::RunOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment file")->required();
  cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Overrides scenario.seed");
  cmd->add_flag("--strict", opts.strict, "Reject unknown config keys and saturated sweep costs");
  cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set risk.k=0.5")->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"No-trade zone solver for trading under slippage and quadratic risk", "ntz"};
  app.footer(kUnits);
  app.require_subcommand(1);

  ntz::cli::RunOptions opts;
  struct Cmd {
    const char* name;
    const char* help;
  };
  for (const Cmd c : {Cmd{"solve", "Closed-form plateau, zone and optimal path (solution.json, path.csv)"},
                      Cmd{"verify", "Cross-check the closed form against the path optimizer (report.json)"},
                      Cmd{"sweep", "Zone width over a cost grid with a log-log fit (sweep.csv, sweep.svg, report.json)"},
                      Cmd{"simulate", "Roll a position through forecast revisions (sim.csv, sim.svg, report.json)"}}) {
    add_common(app.add_subcommand(c.name, c.help), opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ntz::cli::kExitBadConfig;
  }
  return ntz::cli::dispatch(app.get_subcommands().front()->get_name(), opts, std::cerr);
}
