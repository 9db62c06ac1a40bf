#include "ntz/tv_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "ntz/error.hpp"

namespace ntz {

namespace {

// A kink of the piecewise-linear derivative of the cost-to-go: crossing x from
// left to right adds (da, db) to the local slope/intercept.
struct Breakpoint {
  double x;
  double da;
  double db;
};

// Forward pass state of the dynamic program for the weighted 1-D TV prox.
// Holds the derivative D of the cost-to-go as a non-decreasing piecewise-linear
// function a x + b. The line left of the first kink is (al_, bl_), right of the
// last kink (ar_, br_). D may jump at a kink (the head anchor puts one there).
class CostToGo {
 public:
  CostToGo() = default;
  explicit CostToGo(const Anchor& head) : bl_(-head.weight), br_(head.weight) {
    kinks_.push_back({head.value, 0.0, 2.0 * head.weight});
  }

  // Adds the data term 1/2 (x - y)^2.
  void add(double y) {
    al_ += 1.0;
    bl_ -= y;
    ar_ += 1.0;
    br_ -= y;
  }

  // Replaces D by its clamp to [-lambda, lambda]. Returns {lo, hi} with
  // lo = min{x : D(x) >= -lambda} and hi = max{x : D(x) <= lambda}; the
  // previous coordinate is the next one clamped to [lo, hi].
  std::pair<double, double> clip(double lambda) {
    double a = al_, b = bl_;
    double lo = 0.0;
    bool found = false;
    while (!kinks_.empty()) {
      const Breakpoint k = kinks_.front();
      if (a * k.x + b >= -lambda) {
        lo = (-lambda - b) / a;
        found = true;
        break;
      }
      // Kinks sharing an x form one jump.
      while (!kinks_.empty() && kinks_.front().x == k.x) {
        a += kinks_.front().da;
        b += kinks_.front().db;
        kinks_.pop_front();
      }
      if (a * k.x + b >= -lambda) {  // the jump at k.x covers -lambda
        lo = k.x;
        found = true;
        break;
      }
    }
    if (!found) lo = (-lambda - b) / a;
    const double a_lo = a, b_lo = b;

    a = ar_;
    b = br_;
    double hi = 0.0;
    found = false;
    while (!kinks_.empty()) {
      const Breakpoint k = kinks_.back();
      if (a * k.x + b <= lambda) {
        hi = (lambda - b) / a;
        found = true;
        break;
      }
      while (!kinks_.empty() && kinks_.back().x == k.x) {
        a -= kinks_.back().da;
        b -= kinks_.back().db;
        kinks_.pop_back();
      }
      if (a * k.x + b <= lambda) {
        hi = k.x;
        found = true;
        break;
      }
    }
    if (!found) {
      // Every remaining kink is gone; the segment holding lo is the one to solve on.
      a = a_lo;
      b = b_lo;
      hi = (lambda - b) / a;
    }
    // A jump across the whole band at lo leaves no room: lo == hi.
    hi = std::max(hi, lo);

    kinks_.push_front({lo, a_lo, b_lo + lambda});
    kinks_.push_back({hi, -a, lambda - b});
    al_ = 0.0;
    bl_ = -lambda;
    ar_ = 0.0;
    br_ = lambda;
    return {lo, hi};
  }

 private:
  std::deque<Breakpoint> kinks_;
  double al_ = 0.0, bl_ = 0.0, ar_ = 0.0, br_ = 0.0;
};

double mean_tail(const std::deque<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

void OracleConfig::validate(const ForecastProfile& profile) const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle dt must be positive");
  if (!(horizon >= 10.0 * profile.characteristic_time())) {
    throw Error(ErrorCode::InvalidArgument, "oracle horizon must cover 10 characteristic forecast times");
  }
  if (!(tol > 0.0 && tol <= 1e-4)) throw Error(ErrorCode::InvalidArgument, "oracle tol must lie in (0, 1e-4]");
  if (max_iter < 1000) throw Error(ErrorCode::InvalidArgument, "oracle max_iter must be at least 1000");
  if (horizon / dt < 2.0) throw Error(ErrorCode::InvalidArgument, "oracle grid needs at least two steps");
}

std::vector<double> tv_prox(std::span<const double> y, std::span<const double> weights) {
  return tv_prox(y, weights, std::nullopt, std::nullopt);
}

std::vector<double> tv_prox(std::span<const double> y, std::span<const double> weights,
                            std::optional<Anchor> head, std::optional<Anchor> tail) {
  const std::size_t n = y.size();
  if (n == 0) return {};
  if (weights.size() + 1 != n) throw Error(ErrorCode::InvalidArgument, "tv_prox needs y.size() - 1 weights");
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "tv_prox weights must be non-negative");
  }
  if ((head && !(head->weight >= 0.0)) || (tail && !(tail->weight >= 0.0))) {
    throw Error(ErrorCode::NegativeWeight, "anchor weights must be non-negative");
  }

  CostToGo chain = head ? CostToGo(*head) : CostToGo();
  chain.add(y[0]);
  std::vector<double> lo(n);
  std::vector<double> hi(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::tie(lo[i], hi[i]) = chain.clip(weights[i]);
    chain.add(y[i + 1]);
  }

  std::vector<double> x(n);
  if (tail) {
    const auto [l, h] = chain.clip(tail->weight);
    x[n - 1] = std::clamp(tail->value, l, h);
  } else {
    x[n - 1] = chain.clip(0.0).first;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] = std::clamp(x[i + 1], lo[i], hi[i]);
  return x;
}

void TvProgram::validate() const {
  const std::size_t n = linear.size();
  if (n == 0 || quadratic.size() != n || edge_weights.size() + 1 != n) {
    throw Error(ErrorCode::MismatchedGrid, "program coefficient sizes are inconsistent");
  }
  for (double q : quadratic) {
    if (!(q > 0.0)) throw Error(ErrorCode::InvalidArgument, "program quadratic weights must be positive");
  }
  for (double w : edge_weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "program edge weights must be non-negative");
  }
  if (!(head.weight >= 0.0) || (tail && !(tail->weight >= 0.0))) {
    throw Error(ErrorCode::NegativeWeight, "anchor weights must be non-negative");
  }
}

double TvProgram::objective(std::span<const double> x) const {
  const std::size_t n = size();
  double smooth = 0.0;
  for (std::size_t i = 0; i < n; ++i) smooth += linear[i] * x[i] - quadratic[i] * x[i] * x[i];
  double tv = head.weight * std::abs(x[0] - head.value);
  for (std::size_t i = 0; i + 1 < n; ++i) tv += edge_weights[i] * std::abs(x[i + 1] - x[i]);
  if (tail) tv += tail->weight * std::abs(x[n - 1] - tail->value);
  return smooth - tv;
}

ProgramSolution solve_program(const TvProgram& program, std::span<const double> x0, double tol, int max_iter) {
  program.validate();
  const std::size_t n = program.size();
  if (x0.size() != n) throw Error(ErrorCode::MismatchedGrid, "initial point has the wrong size");

  const double lipschitz = 2.0 * *std::max_element(program.quadratic.begin(), program.quadratic.end());
  std::vector<double> scaled_edges(program.edge_weights);
  for (double& w : scaled_edges) w /= lipschitz;
  const Anchor head{program.head.value, program.head.weight / lipschitz};
  std::optional<Anchor> tail;
  if (program.tail) tail = Anchor{program.tail->value, program.tail->weight / lipschitz};

  ProgramSolution out;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> y = x;
  std::vector<double> v(n);
  double objective = program.objective(x);
  double momentum = 1.0;
  bool plain_step = true;  // y == x, so the step below is a monotone proximal-gradient step
  std::deque<double> recent;
  out.history.push_back(objective);

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = y[i] - (2.0 * program.quadratic[i] * y[i] - program.linear[i]) / lipschitz;
    }
    std::vector<double> next = tv_prox(v, scaled_edges, head, tail);
    const double next_objective = program.objective(next);

    if (next_objective < objective) {
      if (plain_step) {
        // A proximal-gradient step cannot lose ground except by rounding: done.
        out.final_rel_change = (objective - next_objective) / std::max(std::abs(objective), std::numeric_limits<double>::min());
        out.converged = true;
        break;
      }
      momentum = 1.0;
      y = x;
      plain_step = true;
      continue;
    }

    const double rel = std::abs(next_objective - objective) /
                       std::max(std::abs(next_objective), std::numeric_limits<double>::min());
    recent.push_back(rel);
    if (recent.size() > 10) recent.pop_front();
    out.final_rel_change = mean_tail(recent);

    const bool fixed_point = next == x;
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next_momentum;
    for (std::size_t i = 0; i < n; ++i) y[i] = next[i] + beta * (next[i] - x[i]);
    plain_step = beta == 0.0;
    momentum = next_momentum;
    x = std::move(next);
    objective = next_objective;
    out.history.push_back(objective);

    if (fixed_point) out.final_rel_change = rel;
    if (fixed_point || (recent.size() == 10 && out.final_rel_change < tol)) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.objective = objective;
  return out;
}

double kkt_residual(const TvProgram& program, std::span<const double> x) {
  program.validate();
  const std::size_t n = program.size();
  if (x.size() != n) throw Error(ErrorCode::MismatchedGrid, "point has the wrong size");

  double scale = std::abs(program.head.value);
  for (double xi : x) scale = std::max(scale, std::abs(xi));
  const double flat = 1e-12 * std::max(scale, 1.0);

  // Edge e carries a subgradient z_e of w_e |x_right - x_left| (w.r.t. x_right).
  // Stationarity at coordinate j chains them: z_{j+1} = z_j + g_j, so every z
  // is z_head plus a prefix sum of the smooth gradient g. Each edge then
  // confines z_head to an interval; the residual is how far those miss.
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  auto constrain = [&](double prefix, double weight, double diff) {
    double a = -weight;
    double b = weight;
    if (diff > flat) a = b = weight;
    if (diff < -flat) a = b = -weight;
    lower = std::max(lower, a - prefix);
    upper = std::min(upper, b - prefix);
  };

  double prefix = 0.0;
  constrain(prefix, program.head.weight, x[0] - program.head.value);
  for (std::size_t j = 0; j < n; ++j) {
    prefix += 2.0 * program.quadratic[j] * x[j] - program.linear[j];
    if (j + 1 < n) {
      constrain(prefix, program.edge_weights[j], x[j + 1] - x[j]);
    } else if (program.tail) {
      constrain(prefix, program.tail->weight, program.tail->value - x[j]);
    } else {
      constrain(prefix, 0.0, 0.0);  // no edge beyond the last coordinate: z = 0
    }
  }
  return lower <= upper ? 0.0 : 0.5 * (lower - upper);
}

TvProgram build_program(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                        const OracleConfig& config) {
  if (!(k > 0.0)) throw Error(ErrorCode::NonPositiveRisk, "risk aversion k must be positive");
  cost.validate();
  config.validate(profile);
  const auto grid = uniform_grid(config.dt, config.horizon);
  const std::size_t n = grid.size() - 1;

  TvProgram program;
  program.linear.resize(n);
  program.quadratic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    program.linear[i] = profile.rate(grid[i]) * h;
    program.quadratic[i] = k * h;
  }
  program.edge_weights.assign(n - 1, cost.c_mean);
  program.head = {p0, cost.c_now};
  if (config.terminal_liquidation) program.tail = Anchor{0.0, cost.c_mean};
  return program;
}

namespace {

OracleResult finish_oracle(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                           const OracleConfig& config, ProgramSolution sol) {
  auto grid = uniform_grid(config.dt, config.horizon);
  std::vector<double> positions = std::move(sol.x);
  positions.push_back(positions.back());
  PositionPath path(std::move(grid), std::move(positions), p0);
  const UtilityBreakdown utility = utility_direct(path, profile, cost, k, config.terminal_liquidation);
  return OracleResult{std::move(path),   utility,     sol.objective, sol.iterations, sol.converged,
                      sol.final_rel_change, std::move(sol.history)};
}

std::vector<double> cost_free_start(const TvProgram& program) {
  std::vector<double> x0(program.size());
  for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = program.linear[i] / (2.0 * program.quadratic[i]);
  return x0;
}

}  // namespace

OracleResult optimize_path(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                           const OracleConfig& config) {
  const TvProgram program = build_program(profile, p0, cost, k, config);
  ProgramSolution sol = solve_program(program, cost_free_start(program), config.tol, config.max_iter);
  return finish_oracle(profile, p0, cost, k, config, std::move(sol));
}

double default_trade_epsilon(const ForecastProfile& profile, double k, const OracleConfig& config) {
  if (!(k > 0.0)) throw Error(ErrorCode::NonPositiveRisk, "risk aversion k must be positive");
  const auto grid = uniform_grid(config.dt, config.horizon);
  double peak = 0.0;
  for (double t : grid) peak = std::max(peak, std::abs(profile.rate(t)));
  return 10.0 * config.dt * peak / (2.0 * k);
}

NtzEstimate estimate_ntz(const ForecastProfile& profile, const CostModel& cost, double k,
                         const OracleConfig& config, const NtzEstimateOptions& options) {
  TvProgram program = build_program(profile, 0.0, cost, k, config);
  const std::vector<double> x0 = cost_free_start(program);
  double peak = 0.0;
  for (double x : x0) peak = std::max(peak, std::abs(x));

  NtzEstimate est;
  // Inside the zone the exact prox returns an exactly zero first trade, so the
  // default threshold only has to absorb rounding.
  est.trade_epsilon = options.trade_epsilon > 0.0 ? options.trade_epsilon : std::max(1e-9 * peak, 1e-15);
  const double resolution = std::max(options.resolution > 0.0 ? options.resolution : 1e-3 * peak, 1e-12);

  // Returns the landing position x_0 for a start at p.
  auto land = [&](double p) {
    program.head.value = p;
    ++est.probes;
    const ProgramSolution sol = solve_program(program, x0, config.tol, config.max_iter);
    if (!sol.converged) throw Error(ErrorCode::NotConverged, "oracle did not converge while probing the zone");
    return sol.x.front();
  };
  auto inside = [&](double p) { return std::abs(land(p) - p) < est.trade_epsilon; };

  const double sign = profile.orientation();
  double range_lo = sign > 0.0 ? -0.25 * peak : -1.25 * peak;
  double range_hi = sign > 0.0 ? 1.25 * peak : 0.25 * peak;
  if (peak == 0.0) {
    range_lo = -1.0;
    range_hi = 1.0;
  }

  // Starts far outside the zone land on its edges, which are inside points.
  const double from_below = land(range_lo);
  const double from_above = land(range_hi);
  std::vector<double> candidates{from_below, from_above};
  const int n_scan = std::max(options.scan_points, 3);
  for (int i = 0; i < n_scan; ++i) candidates.push_back(range_lo + (range_hi - range_lo) * i / (n_scan - 1));
  std::sort(candidates.begin(), candidates.end());
  std::vector<char> is_inside(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) is_inside[i] = inside(candidates[i]);

  const auto first_in = std::find(is_inside.begin(), is_inside.end(), 1);
  if (first_in == is_inside.end()) {
    est.degenerate = true;
    est.zone = {std::min(from_below, from_above), std::max(from_below, from_above)};
    return est;
  }
  const auto lo_idx = static_cast<std::size_t>(first_in - is_inside.begin());
  const auto hi_idx = static_cast<std::size_t>(is_inside.rend() - std::find(is_inside.rbegin(), is_inside.rend(), 1)) - 1;

  const double span = range_hi - range_lo;
  double out_below = lo_idx > 0 ? candidates[lo_idx - 1] : candidates[lo_idx] - span;
  while (lo_idx == 0 && inside(out_below)) out_below -= span;
  double out_above = hi_idx + 1 < candidates.size() ? candidates[hi_idx + 1] : candidates[hi_idx] + span;
  while (hi_idx + 1 == candidates.size() && inside(out_above)) out_above += span;

  auto bisect = [&](double in, double out) {
    while (std::abs(in - out) > resolution) {
      const double mid = 0.5 * (in + out);
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };
  est.zone.low = bisect(candidates[lo_idx], out_below);
  est.zone.high = bisect(candidates[hi_idx], out_above);
  return est;
}

}  // namespace ntz
