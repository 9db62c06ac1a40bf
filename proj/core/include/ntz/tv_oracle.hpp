#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ntz/closed_form.hpp"
#include "ntz/forecast.hpp"
#include "ntz/utility.hpp"

namespace ntz {

/// Discretization and stopping rules for the path optimizer.
struct OracleConfig {
  double dt = 1e-3;
  double horizon = 50.0;
  double tol = 1e-10;  // relative utility change, averaged over 10 iterations
  int max_iter = 1000;
  bool terminal_liquidation = true;

  /// Throws InvalidArgument; the horizon must span 10 characteristic times of the profile.
  void validate(const ForecastProfile& profile) const;
};

/// A coordinate pinned at `value` and tied to the end of the sequence by an
/// edge of weight `weight`.
struct Anchor {
  double value = 0.0;
  double weight = 0.0;
};

/// Exact minimizer of 1/2 sum (x_i - y_i)^2 + sum w_i |x_{i+1} - x_i|.
/// weights.size() must be y.size() - 1.
std::vector<double> tv_prox(std::span<const double> y, std::span<const double> weights);

/// Same with optional fixed endpoints: `head` adds head.weight |x_0 - head.value|,
/// `tail` adds tail.weight |x_{n-1} - tail.value|.
std::vector<double> tv_prox(std::span<const double> y, std::span<const double> weights,
                            std::optional<Anchor> head, std::optional<Anchor> tail);

/// Concave program  max  sum (linear_i x_i - quadratic_i x_i^2) - sum edge_i |x_{i+1} - x_i|
///                       - head.weight |x_0 - head.value| - tail.weight |x_{n-1} - tail.value|.
struct TvProgram {
  std::vector<double> linear;
  std::vector<double> quadratic;    // strictly positive
  std::vector<double> edge_weights;  // size n - 1
  Anchor head;
  std::optional<Anchor> tail;

  std::size_t size() const noexcept { return linear.size(); }
  double objective(std::span<const double> x) const;
  void validate() const;
};

struct ProgramSolution {
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_rel_change = 0.0;  // last step when converged, else the 10-step mean
  std::vector<double> history;  // accepted objective values, non-decreasing
};

/// Accelerated proximal gradient (FISTA with function-value restart). The
/// smooth part is separable, so a uniform `quadratic` makes each step exact.
ProgramSolution solve_program(const TvProgram& program, std::span<const double> x0, double tol, int max_iter);

/// Smallest stationarity violation over all subgradient selections consistent
/// with the signs of the differences of x (0 at an exact optimum).
double kkt_residual(const TvProgram& program, std::span<const double> x);

/// The discretized utility on the config grid with the initial position as head anchor.
/// Variables are the positions held on each step; the terminal sample repeats the last one.
TvProgram build_program(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                        const OracleConfig& config);

struct OracleResult {
  PositionPath path;
  UtilityBreakdown utility;  // utility_direct of `path`
  double objective = 0.0;    // value of the discretized program
  int iterations = 0;
  bool converged = false;
  double final_rel_change = 0.0;
  std::vector<double> history;

  double first_trade() const { return path.positions().front() - path.initial_position(); }
};

/// Maximizes the discretized utility with no assumptions on the forecast shape.
/// Not converging within max_iter is reported through `converged`, with the best iterate.
OracleResult optimize_path(const ForecastProfile& profile, double p0, const CostModel& cost, double k,
                           const OracleConfig& config);

struct NtzEstimateOptions {
  double trade_epsilon = 0.0;  // 0 selects 1e-9 times the largest cost-free target
  double resolution = 0.0;     // 0 selects 1e-3 times the largest cost-free target
  int scan_points = 41;
};

struct NtzEstimate {
  NoTradeZone zone;
  bool degenerate = false;  // no untraded start was found; zone collapsed to the landing point
  double trade_epsilon = 0.0;
  int probes = 0;
};

/// 10 dt max|f'| / 2k: the first-trade size below which a start counts as untraded.
double default_trade_epsilon(const ForecastProfile& profile, double k, const OracleConfig& config);

/// Empirical no-trade zone: starts whose optimal first trade is below
/// trade_epsilon, with both edges located by scan-then-bisect. Each reported
/// edge is the outermost untraded start found, at most `resolution` inside the
/// true edge; a large trade_epsilon pushes the edges outward by about its size.
NtzEstimate estimate_ntz(const ForecastProfile& profile, const CostModel& cost, double k,
                         const OracleConfig& config, const NtzEstimateOptions& options = {});

}  // namespace ntz
