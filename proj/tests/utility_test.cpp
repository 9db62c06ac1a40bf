#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ntz/closed_form.hpp"
#include "ntz/error.hpp"
#include "ntz/utility.hpp"
#include "support.hpp"

using namespace ntz;
using ntz::test::Rng;
using ntz::test::uniform;

namespace {

const ForecastProfile kFlat = ForecastProfile::rational(0.0, 1.0);

PositionPath random_closed_path(Rng& rng) {
  const int n = 5 + static_cast<int>(rng() % 60);
  std::vector<double> times{0.0}, positions;
  for (int i = 1; i < n; ++i) times.push_back(times.back() + uniform(rng, 0.01, 0.5));
  for (int i = 0; i + 1 < n; ++i) positions.push_back(rng() % 3 == 0 && !positions.empty() ? positions.back() : uniform(rng, -2.0, 2.0));
  positions.push_back(0.0);
  return PositionPath(times, positions, uniform(rng, -1.0, 1.0));
}

}  // namespace

TEST_CASE("path construction and trades") {
  CHECK_THROWS_AS(PositionPath({}, {}, 0.0), Error);
  CHECK_THROWS_AS(PositionPath({0.0, 1.0}, {1.0}, 0.0), Error);
  CHECK_THROWS_AS(PositionPath({0.5, 1.0}, {1.0, 1.0}, 0.0), Error);
  CHECK_THROWS_AS(PositionPath({0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.0), Error);

  const PositionPath p({0.0, 1.0, 2.0, 3.0}, {0.5, 0.5, 0.2, 0.0}, -0.1);
  const auto trades = p.trades();
  REQUIRE(trades.size() == 3);
  CHECK(trades[0].t == 0.0);
  CHECK(trades[0].delta == doctest::Approx(0.6));
  CHECK(trades[1].t == 2.0);
  double sum = 0.0;
  for (const auto& t : trades) sum += t.delta;
  CHECK(sum == doctest::Approx(p.final_position() - p.initial_position()).epsilon(1e-15));

  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto q = random_closed_path(rng);
    double s = 0.0;
    for (const auto& t : q.trades()) s += t.delta;
    CHECK(std::abs(s - (q.final_position() - q.initial_position())) < 1e-12);
  }
}

TEST_CASE("empty position has zero utility") {
  const auto grid = uniform_grid(0.01, 5.0);
  const PositionPath zero(grid, std::vector<double>(grid.size(), 0.0), 0.0);
  const auto u = utility_direct(zero, test::standard_profile(), CostModel::uniform(0.1), 0.5);
  CHECK(u.total == 0.0);
  CHECK(u.slippage == 0.0);
  CHECK(utility_by_parts(zero, test::standard_profile(), CostModel::uniform(0.1), 0.5) == 0.0);
}

TEST_CASE("buy and hold under a flat forecast") {
  const auto grid = uniform_grid(0.001, 1.0);
  const PositionPath hold(grid, std::vector<double>(grid.size(), 1.0), 0.0);
  const auto cost = CostModel::uniform(0.1);
  const auto off = utility_direct(hold, kFlat, cost, 0.5, false);
  CHECK(off.total == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(off.risk == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(off.alpha == 0.0);
  const auto on = utility_direct(hold, kFlat, cost, 0.5, true);
  CHECK(on.total == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(on.total == on.alpha + on.slippage + on.risk);
}

TEST_CASE("single roundtrip by parts") {
  const double k = 0.5, T = 2.0;
  const auto grid = uniform_grid(0.01, T);
  std::vector<double> pos(grid.size(), 1.0);
  pos.back() = 0.0;
  const PositionPath trip(grid, pos, 0.0);
  CHECK(utility_by_parts(trip, kFlat, CostModel::uniform(0.1), k) == doctest::Approx(-0.2 - k * T).epsilon(1e-12));
}

TEST_CASE("c_now prices the opening trade") {
  const PositionPath p({0.0, 1.0, 2.0}, {1.0, 0.0, 0.0}, 0.0);
  const auto u = utility_direct(p, kFlat, {0.1, 0.3}, 1.0, false);
  CHECK(u.slippage == doctest::Approx(-0.4));
}

TEST_CASE("closed-form optimal path utility") {
  const auto profile = test::standard_profile();
  const auto cost = CostModel::uniform(0.125);
  const auto grid = uniform_grid(1e-3, 50.0);
  const auto path = optimal_path(profile, 0.0, cost, 0.5, grid);
  const auto u = utility_direct(path, profile, cost, 0.5, true);
  CHECK(std::abs(u.total - 0.0520833333) < 1e-3 * 0.0520833333);
  CHECK(u.total == u.alpha + u.slippage + u.risk);
  CHECK(u.slippage == doctest::Approx(-2 * 0.125 * 0.25).epsilon(1e-12));

  // The truncated tail still holds a small position, so the bare by-parts form refuses it.
  CHECK_THROWS_AS(utility_by_parts(path, profile, cost, 0.5), Error);
  const double parts = utility_by_parts(path, profile, cost, 0.5, true);
  const double direct = utility_direct(path, profile, cost, 0.5, false).total;
  CHECK(std::abs(parts - direct) <= 1e-6 * std::abs(direct));
}

TEST_CASE("direct and by-parts forms agree on closed paths") {
  Rng rng(5);
  const ForecastProfile profiles[] = {test::standard_profile(), ForecastProfile::rational(2.5, 0.3),
                                      ForecastProfile::rational(-0.7, 4.0), test::s_curve()};
  for (int i = 0; i < 50; ++i) {
    const auto path = random_closed_path(rng);
    const auto& profile = profiles[i % 4];
    const CostModel cost{uniform(rng, 0.0, 0.2), uniform(rng, 0.0, 0.2)};
    const double k = uniform(rng, 0.1, 2.0);
    const double direct = utility_direct(path, profile, cost, k, false).total;
    const double parts = utility_by_parts(path, profile, cost, k);
    CHECK(std::abs(direct - parts) <= 1e-8 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("slippage is never positive and vanishes only without trades") {
  Rng rng(6);
  const auto profile = test::standard_profile();
  for (int i = 0; i < 30; ++i) {
    const auto path = random_closed_path(rng);
    const auto u = utility_direct(path, profile, CostModel::uniform(0.05), 1.0);
    CHECK(u.slippage <= 0.0);
    CHECK((u.slippage == 0.0) == path.trades().empty());
  }
  const PositionPath still({0.0, 1.0}, {0.3, 0.3}, 0.3);
  CHECK(utility_direct(still, profile, CostModel::uniform(0.05), 1.0, false).slippage == 0.0);
}

TEST_CASE("closed-form path utility converges under grid refinement") {
  const auto profile = test::standard_profile();
  const auto cost = CostModel::uniform(0.125);
  const double k = 0.5, T = 50.0;
  // Analytic utility of the same plan truncated at T: the ride beyond T is simply cut off.
  const double reference = plateau_utility(profile, 1.0, 0.125, k) - tail_rate_integral(profile, T) / (4 * k);
  double previous = INFINITY;
  for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
    const auto path = optimal_path(profile, 0.0, cost, k, uniform_grid(dt, T));
    const double dev = std::abs(utility_direct(path, profile, cost, k).total - reference);
    CHECK(dev <= 0.5 * previous);
    previous = dev;
  }
  CHECK(previous < 1e-7);
}

TEST_CASE("uniform grid and validation") {
  const auto g = uniform_grid(0.1, 1.0);
  CHECK(g.size() == 11);
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0), Error);
  CHECK_THROWS_AS((CostModel{-0.1, 0.0}.validate()), Error);
  const PositionPath p({0.0, 1.0}, {0.0, 0.0}, 0.0);
  CHECK_THROWS_AS(utility_direct(p, kFlat, CostModel{}, 0.0), Error);
}

TEST_CASE("path csv round trip is exact") {
  const auto profile = test::standard_profile();
  const auto path = optimal_path(profile, 0.1, CostModel::uniform(0.125), 0.5, uniform_grid(0.01, 20.0));
  std::stringstream buf;
  write_path_csv(buf, path);
  const auto back = read_path_csv(buf, 0.1);
  CHECK(back.times() == path.times());
  CHECK(back.positions() == path.positions());
  std::istringstream bad("time,pos\n0,1\n");
  CHECK_THROWS_AS(read_path_csv(bad, 0.0), Error);
}
