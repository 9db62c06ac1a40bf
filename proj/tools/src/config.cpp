#include "ntz/cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "ntz/error.hpp"

namespace ntz::cli {

using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"profile", {"kind", "f_inf", "gamma", "csv", "knots"}},
      {"cost", {"c", "c_mean", "c_now"}},
      {"risk", {"k"}},
      {"position", {"p0"}},
      {"grid", {"dt", "horizon"}},
      {"oracle", {"dt", "horizon", "tol", "max_iter", "terminal_liquidation"}},
      {"verify", {"position_tol", "utility_rel_tol", "estimate_ntz", "scan_points", "resolution"}},
      {"sweep", {"c", "c_min", "c_max", "points", "oracle", "resolution"}},
      {"scenario", {"kind", "dt", "steps", "seed", "rev_rate", "rev_target", "rev_vol", "schedule"}},
  };
  return keys;
}

void check_known_keys(const json& doc) {
  for (const auto& [section, body] : doc.items()) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown config section: " + section);
    if (!body.is_object()) throw ConfigError("config section " + section + " must be an object");
    for (const auto& [key, value] : body.items()) {
      if (!it->second.count(key)) throw ConfigError("unknown config key: " + section + "." + key);
    }
  }
}

const json* lookup(const json& doc, const std::string& section, const std::string& key) {
  const auto s = doc.find(section);
  if (s == doc.end() || !s->is_object()) return nullptr;
  const auto k = s->find(key);
  return k == s->end() || k->is_null() ? nullptr : &*k;
}

std::string path_of(const std::string& section, const std::string& key) { return section + "." + key; }

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("config key " + path + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("config key " + path + " must be finite");
  return x;
}

double require_number(const json& doc, const std::string& section, const std::string& key) {
  const json* v = lookup(doc, section, key);
  if (!v) throw ConfigError("missing config key: " + path_of(section, key));
  return as_number(*v, path_of(section, key));
}

std::optional<double> optional_number(const json& doc, const std::string& section, const std::string& key) {
  const json* v = lookup(doc, section, key);
  if (!v) return std::nullopt;
  return as_number(*v, path_of(section, key));
}

bool optional_bool(const json& doc, const std::string& section, const std::string& key, bool fallback) {
  const json* v = lookup(doc, section, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError("config key " + path_of(section, key) + " must be true or false");
  return v->get<bool>();
}

long optional_integer(const json& doc, const std::string& section, const std::string& key, long fallback) {
  const json* v = lookup(doc, section, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError("config key " + path_of(section, key) + " must be an integer");
  return v->get<long>();
}

std::string require_string(const json& doc, const std::string& section, const std::string& key) {
  const json* v = lookup(doc, section, key);
  if (!v) throw ConfigError("missing config key: " + path_of(section, key));
  if (!v->is_string()) throw ConfigError("config key " + path_of(section, key) + " must be a string");
  return v->get<std::string>();
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError("config key " + path + " must be positive");
}

void require_non_negative(double v, const std::string& path) {
  if (!(v >= 0.0)) throw ConfigError("config key " + path + " must be non-negative");
}

json parse_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("bad override key: " + path);
    if (!node->is_object()) *node = json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = parse_value(assignment.substr(eq + 1));
}

Config Config::load(const RunOptions& options) {
  if (options.config_path.empty()) throw ConfigError("missing --config <path>");
  std::ifstream in(options.config_path);
  if (!in) throw ConfigError("cannot open config file: " + options.config_path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("config is not a JSON object: " + options.config_path);
  for (const auto& o : options.overrides) apply_override(doc, o);
  if (options.seed) doc["scenario"]["seed"] = *options.seed;
  const auto dir = std::filesystem::path(options.config_path).parent_path();
  return from_json(std::move(doc), dir.empty() ? "." : dir.string(), options.strict);
}

Config Config::from_json(json doc, std::string base_dir, bool strict) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (strict) check_known_keys(doc);
  Config c;
  c.doc_ = std::move(doc);
  c.base_dir_ = std::move(base_dir);
  return c;
}

ForecastProfile Config::profile() const {
  const std::string kind = require_string(doc_, "profile", "kind");
  try {
    if (kind == "rational") {
      const double f_inf = require_number(doc_, "profile", "f_inf");
      const double gamma = require_number(doc_, "profile", "gamma");
      require_positive(gamma, "profile.gamma");
      return ForecastProfile::rational(f_inf, gamma);
    }
    if (kind == "tabulated") {
      if (const json* csv = lookup(doc_, "profile", "csv")) {
        if (!csv->is_string()) throw ConfigError("config key profile.csv must be a string");
        std::filesystem::path p(csv->get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir_) / p;
        return load_profile_csv(p.string());
      }
      const json* knots = lookup(doc_, "profile", "knots");
      if (!knots) throw ConfigError("missing config key: profile.csv (or profile.knots)");
      if (!knots->is_array()) throw ConfigError("config key profile.knots must be an array of [t, f] pairs");
      std::vector<Knot> k;
      for (const auto& pair : *knots) {
        if (!pair.is_array() || pair.size() != 2) throw ConfigError("profile.knots entries must be [t, f] pairs");
        k.push_back({as_number(pair[0], "profile.knots"), as_number(pair[1], "profile.knots")});
      }
      return ForecastProfile::tabulated(std::move(k));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotConcave) throw;
    throw ConfigError(std::string("invalid profile: ") + e.what());
  }
  throw ConfigError("config key profile.kind must be \"rational\" or \"tabulated\"");
}

CostModel Config::cost() const {
  const auto c = optional_number(doc_, "cost", "c");
  const auto c_mean = optional_number(doc_, "cost", "c_mean");
  const auto c_now = optional_number(doc_, "cost", "c_now");
  CostModel m;
  if (c_mean) {
    m.c_mean = *c_mean;
  } else if (c) {
    m.c_mean = *c;
  } else {
    throw ConfigError("missing config key: cost.c (or cost.c_mean)");
  }
  m.c_now = c_now ? *c_now : (c ? *c : m.c_mean);
  require_non_negative(m.c_mean, "cost.c_mean");
  require_non_negative(m.c_now, "cost.c_now");
  return m;
}

double Config::k() const {
  const double k = require_number(doc_, "risk", "k");
  require_positive(k, "risk.k");
  return k;
}

double Config::p0() const { return optional_number(doc_, "position", "p0").value_or(0.0); }

GridSettings Config::grid(const ForecastProfile& profile) const {
  GridSettings g;
  g.dt = optional_number(doc_, "grid", "dt").value_or(1e-3);
  g.horizon = optional_number(doc_, "grid", "horizon").value_or(50.0 * profile.characteristic_time());
  require_positive(g.dt, "grid.dt");
  require_positive(g.horizon, "grid.horizon");
  if (g.horizon < 2.0 * g.dt) throw ConfigError("config key grid.horizon must cover at least two steps");
  return g;
}

OracleConfig Config::oracle(const ForecastProfile& profile) const {
  OracleConfig o;
  o.dt = optional_number(doc_, "oracle", "dt").value_or(1e-3);
  o.horizon = optional_number(doc_, "oracle", "horizon").value_or(50.0 * profile.characteristic_time());
  o.tol = optional_number(doc_, "oracle", "tol").value_or(1e-10);
  o.max_iter = static_cast<int>(optional_integer(doc_, "oracle", "max_iter", 1000));
  o.terminal_liquidation = optional_bool(doc_, "oracle", "terminal_liquidation", true);
  require_positive(o.dt, "oracle.dt");
  try {
    o.validate(profile);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid oracle section: ") + e.what());
  }
  return o;
}

VerifySettings Config::verify() const {
  VerifySettings v;
  v.position_tol = optional_number(doc_, "verify", "position_tol").value_or(v.position_tol);
  v.utility_rel_tol = optional_number(doc_, "verify", "utility_rel_tol").value_or(v.utility_rel_tol);
  v.estimate_ntz = optional_bool(doc_, "verify", "estimate_ntz", v.estimate_ntz);
  v.scan_points = static_cast<int>(optional_integer(doc_, "verify", "scan_points", v.scan_points));
  v.resolution = optional_number(doc_, "verify", "resolution").value_or(0.0);
  require_positive(v.position_tol, "verify.position_tol");
  require_positive(v.utility_rel_tol, "verify.utility_rel_tol");
  require_non_negative(v.resolution, "verify.resolution");
  return v;
}

SweepSettings Config::sweep() const {
  SweepSettings s;
  if (const json* list = lookup(doc_, "sweep", "c")) {
    if (!list->is_array()) throw ConfigError("config key sweep.c must be an array of costs");
    for (const auto& v : *list) s.cs.push_back(as_number(v, "sweep.c"));
  } else {
    const double lo = require_number(doc_, "sweep", "c_min");
    const double hi = require_number(doc_, "sweep", "c_max");
    const long n = optional_integer(doc_, "sweep", "points", 10);
    require_positive(lo, "sweep.c_min");
    if (!(hi > lo)) throw ConfigError("config key sweep.c_max must exceed sweep.c_min");
    if (n < 2) throw ConfigError("config key sweep.points must be at least 2");
    for (long i = 0; i < n; ++i) {
      s.cs.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1)));
    }
  }
  if (s.cs.empty()) throw ConfigError("config key sweep.c must not be empty");
  for (std::size_t i = 0; i < s.cs.size(); ++i) {
    require_positive(s.cs[i], "sweep.c");
    if (i > 0 && !(s.cs[i] > s.cs[i - 1])) throw ConfigError("config key sweep.c must be strictly increasing");
  }
  s.oracle = optional_bool(doc_, "sweep", "oracle", false);
  s.resolution = optional_number(doc_, "sweep", "resolution").value_or(s.resolution);
  require_positive(s.resolution, "sweep.resolution");
  return s;
}

ScenarioSettings Config::scenario() const {
  ScenarioSettings out;
  const std::string kind = require_string(doc_, "scenario", "kind");
  out.dt = optional_number(doc_, "scenario", "dt").value_or(out.dt);
  out.steps = optional_integer(doc_, "scenario", "steps", out.steps);
  require_positive(out.dt, "scenario.dt");
  if (out.steps < 1) throw ConfigError("config key scenario.steps must be at least 1");

  std::uint64_t seed = 0;
  if (const json* s = lookup(doc_, "scenario", "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      throw ConfigError("config key scenario.seed must be a non-negative integer");
    }
    seed = s->get<std::uint64_t>();
  }

  try {
    if (kind == "mean_reverting") {
      out.scenario = RevisionScenario::mean_reverting(optional_number(doc_, "scenario", "rev_rate").value_or(0.0),
                                                      optional_number(doc_, "scenario", "rev_target").value_or(0.0),
                                                      optional_number(doc_, "scenario", "rev_vol").value_or(0.0), seed);
      return out;
    }
    if (kind == "deterministic") {
      std::vector<ScheduleEntry> schedule;
      if (const json* list = lookup(doc_, "scenario", "schedule")) {
        if (!list->is_array()) throw ConfigError("config key scenario.schedule must be an array");
        for (const auto& e : *list) {
          if (!e.is_object() || !e.contains("t") || !e.contains("f_inf")) {
            throw ConfigError("scenario.schedule entries need keys t and f_inf");
          }
          ScheduleEntry entry;
          entry.t = as_number(e["t"], "scenario.schedule.t");
          entry.f_inf = as_number(e["f_inf"], "scenario.schedule.f_inf");
          if (e.contains("gamma")) entry.gamma = as_number(e["gamma"], "scenario.schedule.gamma");
          if (e.contains("c_now")) entry.c_now = as_number(e["c_now"], "scenario.schedule.c_now");
          schedule.push_back(entry);
        }
      }
      out.scenario = RevisionScenario::deterministic(std::move(schedule));
      out.scenario.seed = seed;
      return out;
    }
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  throw ConfigError("config key scenario.kind must be \"mean_reverting\" or \"deterministic\"");
}

}  // namespace ntz::cli
