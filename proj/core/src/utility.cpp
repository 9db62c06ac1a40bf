#include "ntz/utility.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ntz/error.hpp"
#include "ntz/io_format.hpp"

namespace ntz {

namespace {

void check_risk(double k) {
  if (!(k > 0.0)) throw Error(ErrorCode::NonPositiveRisk, "risk aversion k must be positive");
}

}  // namespace

void CostModel::validate() const {
  if (!(c_mean >= 0.0) || !(c_now >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "slippage costs must be non-negative");
  }
}

PositionPath::PositionPath(std::vector<double> times, std::vector<double> positions, double initial_position)
    : times_(std::move(times)), positions_(std::move(positions)), initial_position_(initial_position) {
  if (times_.empty()) throw Error(ErrorCode::MismatchedGrid, "path grid is empty");
  if (times_.size() != positions_.size()) {
    throw Error(ErrorCode::MismatchedGrid, "path times and positions differ in length");
  }
  if (times_.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "path must start at t = 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "path times must be strictly increasing");
    }
  }
}

std::vector<Trade> PositionPath::trades() const {
  std::vector<Trade> out;
  double prev = initial_position_;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double delta = positions_[i] - prev;
    if (delta != 0.0) out.push_back({times_[i], delta});
    prev = positions_[i];
  }
  return out;
}

std::vector<double> uniform_grid(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid needs dt > 0 and horizon > 0");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> grid(std::max<std::size_t>(steps, 1) + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) * dt;
  return grid;
}

UtilityBreakdown utility_direct(const PositionPath& path, const ForecastProfile& profile, const CostModel& cost,
                                double k, bool terminal_liquidation) {
  check_risk(k);
  cost.validate();
  const auto& t = path.times();
  const auto& p = path.positions();
  const std::size_t n = t.size();

  UtilityBreakdown b;
  double rate_left = profile.rate(t[0]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    const double rate_right = profile.rate(t[i + 1]);
    b.alpha += p[i] * 0.5 * (rate_left + rate_right) * h;
    b.risk -= k * p[i] * p[i] * h;
    rate_left = rate_right;
  }

  double paid = cost.c_now * std::abs(p[0] - path.initial_position());
  for (std::size_t i = 1; i < n; ++i) paid += cost.c_mean * std::abs(p[i] - p[i - 1]);
  if (terminal_liquidation) paid += cost.c_mean * std::abs(p[n - 1]);
  b.slippage = -paid;

  b.total = b.alpha + b.slippage + b.risk;
  return b;
}

double utility_by_parts(const PositionPath& path, const ForecastProfile& profile, const CostModel& cost, double k,
                        bool boundary_correction) {
  check_risk(k);
  cost.validate();
  const auto& t = path.times();
  const auto& p = path.positions();
  const std::size_t n = t.size();

  double cumulative = 0.0;  // F(t_i), starts at f(0) = 0
  double rate_left = profile.rate(t[0]);
  double jumps = 0.0;
  double risk = 0.0;
  double prev = path.initial_position();
  for (std::size_t i = 0; i < n; ++i) {
    const double dp = p[i] - prev;
    const double c = i == 0 ? cost.c_now : cost.c_mean;
    jumps += dp * cumulative + c * std::abs(dp);
    prev = p[i];
    if (i + 1 < n) {
      const double h = t[i + 1] - t[i];
      const double rate_right = profile.rate(t[i + 1]);
      cumulative += 0.5 * (rate_left + rate_right) * h;
      risk += k * p[i] * p[i] * h;
      rate_left = rate_right;
    }
  }
  const double total = -jumps - risk;
  const double boundary = cumulative * p[n - 1];
  if (boundary_correction) return total + boundary;
  if (std::abs(boundary) > 1e-6 * std::abs(total)) {
    throw Error(ErrorCode::BoundaryTermTooLarge,
                "boundary term F(T) P_final is not negligible; close the path or request the correction");
  }
  return total;
}

void write_path_csv(std::ostream& out, const PositionPath& path) {
  out << "t,position\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.times()[i]) << ',' << format_double(path.positions()[i]) << '\n';
  }
}

PositionPath read_path_csv(std::istream& in, double initial_position) {
  std::string line;
  if (!std::getline(in, line) || line != "t,position") {
    throw Error(ErrorCode::InvalidArgument, "path CSV header must be 't,position'");
  }
  std::vector<double> times;
  std::vector<double> positions;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t = 0.0;
    double p = 0.0;
    char comma = 0;
    if (!(ss >> t >> comma >> p) || comma != ',') throw Error(ErrorCode::InvalidArgument, "bad path CSV row");
    times.push_back(t);
    positions.push_back(p);
  }
  return PositionPath(std::move(times), std::move(positions), initial_position);
}

}  // namespace ntz
