#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ntz/forecast.hpp"
#include "ntz/simulator.hpp"
#include "ntz/tv_oracle.hpp"
#include "ntz/utility.hpp"

namespace ntz::cli {

/// Malformed or incomplete configuration (exit code 2). The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flags shared by all subcommands.
struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::vector<std::string> overrides;  // "section.key=value", value parsed as JSON when it can be
};

struct GridSettings {
  double dt = 1e-3;
  double horizon = 50.0;
};

struct VerifySettings {
  double position_tol = 5e-3;
  double utility_rel_tol = 1e-3;
  bool estimate_ntz = true;
  int scan_points = 41;
  double resolution = 0.0;
};

struct SweepSettings {
  std::vector<double> cs;  // strictly increasing
  bool oracle = false;
  double resolution = 1e-6;
};

struct ScenarioSettings {
  RevisionScenario scenario;
  double dt = 0.01;
  long steps = 1000;
};

/// The JSON experiment file. Sections: profile, cost, risk, position, grid,
/// oracle, verify, sweep, scenario. Each accessor validates only its own section,
/// so a command fails on exactly the keys it needs.
class Config {
 public:
  static Config load(const RunOptions& options);
  static Config from_json(nlohmann::json doc, std::string base_dir = ".", bool strict = false);

  const nlohmann::json& document() const noexcept { return doc_; }

  ForecastProfile profile() const;
  CostModel cost() const;
  double k() const;
  double p0() const;
  GridSettings grid(const ForecastProfile& profile) const;
  OracleConfig oracle(const ForecastProfile& profile) const;
  VerifySettings verify() const;
  SweepSettings sweep() const;
  ScenarioSettings scenario() const;

 private:
  nlohmann::json doc_;
  std::string base_dir_;
};

/// Applies one "a.b.c=value" override in place.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace ntz::cli
