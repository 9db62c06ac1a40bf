#include <cmath>
#include <limits>

#include "doctest.h"
#include "ntz/closed_form.hpp"
#include "ntz/error.hpp"
#include "ntz/tv_oracle.hpp"
#include "support.hpp"

using namespace ntz;
using ntz::test::Rng;
using ntz::test::uniform;

namespace {

struct Instance {
  std::vector<double> y, w;
  std::optional<Anchor> head, tail;

  double objective(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) v += 0.5 * (x[i] - y[i]) * (x[i] - y[i]);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) v += w[i] * std::abs(x[i + 1] - x[i]);
    if (head) v += head->weight * std::abs(x.front() - head->value);
    if (tail) v += tail->weight * std::abs(x.back() - tail->value);
    return v;
  }
};

// Coarse-to-fine grid search: 7 points per coordinate around the incumbent,
// halving the window until the spacing is below 1e-4.
std::vector<double> grid_search(const Instance& in) {
  const std::size_t n = in.y.size();
  double lo = *std::min_element(in.y.begin(), in.y.end());
  double hi = *std::max_element(in.y.begin(), in.y.end());
  for (const auto& a : {in.head, in.tail}) {
    if (a) {
      lo = std::min(lo, a->value);
      hi = std::max(hi, a->value);
    }
  }
  std::vector<double> best(n, 0.5 * (lo + hi));
  double radius = 0.5 * (hi - lo) + 1e-3;
  constexpr int kPoints = 7;
  while (true) {
    const double step = 2.0 * radius / (kPoints - 1);
    std::vector<double> centre = best, x(n);
    double best_val = in.objective(best);
    std::vector<int> idx(n, 0);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) x[i] = centre[i] - radius + step * idx[i];
      const double v = in.objective(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
      std::size_t d = 0;
      while (d < n && ++idx[d] == kPoints) idx[d++] = 0;
      if (d == n) break;
    }
    if (step < 1e-4) return best;
    radius *= 0.5;
  }
}

OracleConfig standard_config() {
  OracleConfig c;
  c.dt = 1e-3;
  c.horizon = 50.0;
  return c;
}

}  // namespace

TEST_CASE("tv prox small cases") {
  const std::vector<double> ones{1, 1, 1};
  CHECK(tv_prox(ones, std::vector<double>{0.3, 7.0}) == ones);

  auto x = tv_prox(std::vector<double>{0, 1}, std::vector<double>{0.25});
  CHECK(x[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(0.75).epsilon(1e-15));

  x = tv_prox(std::vector<double>{0, 1}, std::vector<double>{0.6});
  CHECK(x[0] == doctest::Approx(0.5));
  CHECK(x[1] == doctest::Approx(0.5));

  CHECK(tv_prox(std::vector<double>{2.0}, std::vector<double>{}) == std::vector<double>{2.0});

  // A heavy head anchor pins the first coordinate.
  x = tv_prox(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0}, Anchor{0.0, 10.0}, std::nullopt);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 1.0);

  CHECK_THROWS_AS(tv_prox(std::vector<double>{0, 1}, std::vector<double>{-0.1}), Error);
  CHECK_THROWS_AS(tv_prox(std::vector<double>{0, 1}, std::vector<double>{0.1, 0.1}), Error);
  try {
    tv_prox(std::vector<double>{0, 1}, std::vector<double>{-0.1});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeWeight);
  }
}

TEST_CASE("tv prox matches brute-force grid search") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Instance in;
    const std::size_t n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) in.y.push_back(uniform(rng, -1.0, 1.0));
    for (std::size_t i = 0; i + 1 < n; ++i) in.w.push_back(rng() % 4 == 0 ? 0.0 : uniform(rng, 0.0, 0.6));
    if (rng() % 2) in.head = Anchor{uniform(rng, -1.0, 1.0), uniform(rng, 0.0, 0.6)};
    if (rng() % 3 == 0) in.tail = Anchor{0.0, uniform(rng, 0.0, 0.6)};
    const auto exact = tv_prox(in.y, in.w, in.head, in.tail);
    const auto brute = grid_search(in);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(exact[i] - brute[i]) <= 2e-4);
    CHECK(in.objective(exact) <= in.objective(brute) + 1e-12);
  }
}

TEST_CASE("oracle config validation") {
  const auto p = test::standard_profile();
  auto c = standard_config();
  CHECK_NOTHROW(c.validate(p));
  c.horizon = 5.0;
  CHECK_THROWS_AS(c.validate(p), Error);
  c = standard_config();
  c.tol = 1e-3;
  CHECK_THROWS_AS(c.validate(p), Error);
  c = standard_config();
  c.max_iter = 999;
  CHECK_THROWS_AS(c.validate(p), Error);
  c = standard_config();
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(p), Error);
}

TEST_CASE("oracle reproduces the closed form on the standard case") {
  const auto p = test::standard_profile();
  const auto cost = CostModel::uniform(0.125);
  const auto r = optimize_path(p, 0.0, cost, 0.5, standard_config());
  CHECK(r.converged);
  CHECK(std::abs(r.first_trade() - 0.25) <= 5e-3);
  CHECK(std::abs(r.utility.total - 0.0520833333) <= 1e-3 * 0.0520833333);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1]);

  const auto program = build_program(p, 0.0, cost, 0.5, standard_config());
  const std::vector<double> x(r.path.positions().begin(), r.path.positions().end() - 1);
  CHECK(kkt_residual(program, x) <= 1e-6);
  CHECK(program.objective(x) == doctest::Approx(r.objective).epsilon(1e-14));
}

TEST_CASE("flat forecast liquidates immediately") {
  const auto r = optimize_path(ForecastProfile::rational(0.0, 1.0), 1.0, CostModel::uniform(0.1), 0.5, standard_config());
  CHECK(r.converged);
  CHECK(r.first_trade() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(r.path.final_position()) < 1e-12);
}

TEST_CASE("without costs the oracle path is the cost-free target") {
  const auto p = test::standard_profile();
  const auto r = optimize_path(p, 0.3, CostModel::uniform(0.0), 0.5, standard_config());
  double worst = 0.0;
  const auto& t = r.path.times();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) worst = std::max(worst, std::abs(r.path.positions()[i] - p.rate(t[i])));
  CHECK(worst <= 1e-6);
}

TEST_CASE("oracle and closed form bound each other on random concave cases") {
  Rng rng(32);
  for (int i = 0; i < 20; ++i) {
    const double f_inf = uniform(rng, 0.2, 3.0), gamma = uniform(rng, 0.3, 3.0), k = uniform(rng, 0.2, 2.0);
    const double c = uniform(rng, 0.02, 0.8) * f_inf / 2;
    const double p0 = uniform(rng, -0.5, 1.5) * f_inf * gamma / (2 * k);
    const auto profile = ForecastProfile::rational(f_inf, gamma);
    const auto cost = CostModel::uniform(c);
    OracleConfig cfg;
    cfg.dt = 2e-3 / gamma;
    cfg.horizon = 50.0 / gamma;

    const auto r = optimize_path(profile, p0, cost, k, cfg);
    REQUIRE(r.converged);
    const auto program = build_program(profile, p0, cost, k, cfg);
    const auto cf = optimal_path(profile, p0, cost, k, r.path.times());
    const std::vector<double> x_cf(cf.positions().begin(), cf.positions().end() - 1);
    const std::vector<double> x_or(r.path.positions().begin(), r.path.positions().end() - 1);

    // On its own discretization the oracle is optimal.
    CHECK(program.objective(x_or) >= program.objective(x_cf) - cfg.tol * std::abs(r.objective));
    // Under the trapezoid utility the closed form can only lose at the O(dt) level.
    const double u_cf = utility_direct(cf, profile, cost, k).total;
    CHECK(u_cf >= r.utility.total - 5.0 * cfg.dt * f_inf * gamma * f_inf * gamma / (2 * k));
    CHECK(kkt_residual(program, x_or) <= 1e-6);
  }
}

TEST_CASE("non-uniform programs still converge and report progress") {
  TvProgram prog;
  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    prog.linear.push_back(uniform(rng, -1.0, 1.0));
    prog.quadratic.push_back(uniform(rng, 0.1, 2.0));
  }
  prog.edge_weights.assign(199, 0.05);
  prog.head = {0.0, 0.1};
  const std::vector<double> x0(200, 0.0);
  const auto capped = solve_program(prog, x0, 1e-12, 1);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 1);
  const auto sol = solve_program(prog, x0, 1e-12, 20000);
  CHECK(sol.converged);
  for (std::size_t i = 1; i < sol.history.size(); ++i) CHECK(sol.history[i] >= sol.history[i - 1]);
  CHECK(kkt_residual(prog, sol.x) <= 1e-6);
}

TEST_CASE("empirical no-trade zone") {
  const auto p = test::standard_profile();
  const auto est = estimate_ntz(p, CostModel::uniform(0.125), 0.5, standard_config());
  CHECK_FALSE(est.degenerate);
  CHECK(std::abs(est.zone.low - 0.25) <= 5e-3);
  CHECK(std::abs(est.zone.high - 1.0) <= 5e-3);

  const auto free = estimate_ntz(p, CostModel::uniform(0.0), 0.5, standard_config());
  CHECK(free.zone.width() <= 2 * free.trade_epsilon);
  CHECK(std::abs(free.zone.low - 1.0) <= 1e-9);

  const auto negative = estimate_ntz(p.mirrored(), CostModel::uniform(0.125), 0.5, standard_config());
  CHECK(std::abs(negative.zone.low + 1.0) <= 5e-3);
  CHECK(std::abs(negative.zone.high + 0.25) <= 5e-3);
}

TEST_CASE("s-curve zone regression snapshot") {
  const auto est = estimate_ntz(test::s_curve(), CostModel::uniform(0.05), 0.5, standard_config());
  CHECK_FALSE(est.degenerate);
  CHECK(est.zone.low == doctest::Approx(0.0057121).epsilon(1e-3));
  CHECK(est.zone.high == doctest::Approx(0.4997525).epsilon(1e-5));
  CHECK(est.zone.width() > 0.4);
}

TEST_CASE("default trade epsilon") {
  const auto cfg = standard_config();
  CHECK(default_trade_epsilon(test::standard_profile(), 0.5, cfg) == doctest::Approx(10 * 1e-3 * 1.0));
  // Rate is zero at t = 0 for the s-curve; the largest rate sets the scale instead.
  CHECK(default_trade_epsilon(test::s_curve(), 0.5, cfg) > 0.0);
}
