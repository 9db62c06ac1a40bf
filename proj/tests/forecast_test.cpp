#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ntz/error.hpp"
#include "ntz/forecast.hpp"
#include "support.hpp"

using namespace ntz;
using ntz::test::Rng;
using ntz::test::uniform;

namespace {

double dense_conjugate(const ForecastProfile& p, double s, double xi_max, double step) {
  double best = 0.0;
  for (double xi = 0.0; xi <= xi_max; xi += step) best = std::max(best, p.value(xi) - s * xi);
  return best;
}

bool throws_code(ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("rational profile values and rates") {
  const auto p = test::standard_profile();
  CHECK(p.value(0.0) == 0.0);
  CHECK(p.value(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.value(3.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p.rate(0.0) == 1.0);
  CHECK(p.rate(1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.rate(INFINITY) == 0.0);
  CHECK(p.rate(1e9) < 1e-17);

  const double h = 1e-6;
  for (double t : {0.0 + h, 1.0}) {
    const double fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
    CHECK(std::abs(fd - p.rate(t)) < 1e-8);
  }
  CHECK(eval_forecast(p, 2.0) == p.value(2.0));
  CHECK(eval_forecast_rate(p, 2.0) == p.rate(2.0));
}

TEST_CASE("negative times are rejected") {
  const auto p = test::standard_profile();
  CHECK(throws_code(ErrorCode::NegativeTime, [&] { p.value(-0.1); }));
  CHECK(throws_code(ErrorCode::NegativeTime, [&] { p.rate(-0.1); }));
  const auto s = test::s_curve();
  CHECK(throws_code(ErrorCode::NegativeTime, [&] { s.value(-1e-9); }));
}

TEST_CASE("profile construction is validated") {
  CHECK_THROWS_AS(ForecastProfile::rational(1.0, 0.0), Error);
  CHECK_THROWS_AS(ForecastProfile::tabulated({{0.0, 0.1}, {1.0, 0.5}}), Error);  // f(0) != 0
  CHECK_THROWS_AS(ForecastProfile::tabulated({{0.0, 0.0}, {1.0, 0.5}, {1.0, 0.6}}), Error);
  CHECK_THROWS_AS(ForecastProfile::tabulated({{0.5, 0.0}, {1.0, 0.5}}), Error);  // must start at t = 0
  CHECK_NOTHROW(ForecastProfile::rational(-2.0, 3.0));
}

TEST_CASE("tabulated interpolation hits knots, stays monotone and extends flat") {
  const auto s = test::s_curve();
  CHECK(s.kind() == ForecastProfile::Kind::Tabulated);
  for (const auto& k : s.knots()) CHECK(s.value(k.t) == doctest::Approx(k.f).epsilon(1e-14));
  double prev = 0.0;
  for (double t = 0.0; t <= 10.0; t += 0.0137) {
    const double v = s.value(t);
    CHECK(v >= prev - 1e-15);
    CHECK(s.rate(t) >= 0.0);
    prev = v;
  }
  CHECK(s.value(25.0) == s.knots().back().f);
  CHECK(s.rate(25.0) == 0.0);
  CHECK(s.f_inf() == s.knots().back().f);
  CHECK(s.sampling_horizon() == 10.0);
  // Half-rise of t^2 / (1 + t^2) toward ~0.990 is just under t = 1.
  CHECK(s.characteristic_time() == doctest::Approx(0.995).epsilon(0.01));
  // Close to the analytic curve it was sampled from.
  for (double t : {0.35, 1.23, 4.56}) CHECK(std::abs(s.value(t) - t * t / (1 + t * t)) < 2e-4);
}

TEST_CASE("mirror and rescale") {
  const auto p = ForecastProfile::rational(2.0, 0.5);
  const auto m = p.mirrored();
  CHECK(m.f_inf() == -2.0);
  CHECK(m.orientation() == -1.0);
  CHECK(m.value(3.0) == -p.value(3.0));
  const auto s = test::s_curve();
  const auto half = s.with_f_inf(0.5 * s.f_inf());
  CHECK(half.value(2.0) == doctest::Approx(0.5 * s.value(2.0)).epsilon(1e-14));
  CHECK(s.mirrored().value(2.0) == -s.value(2.0));
}

TEST_CASE("legendre transform of the rational profile") {
  const auto p = test::standard_profile();
  CHECK(legendre_transform(p, 1.0) == 0.0);
  CHECK(legendre_transform(p, 0.25) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(legendre_transform(p, 0.04) == doctest::Approx(0.64).epsilon(1e-12));
  for (double s : {0.01, 0.04, 0.25, 0.5, 0.81}) {
    const double analytic = std::pow(1.0 - std::sqrt(s), 2);
    CHECK(std::abs(legendre_transform(p, s) - analytic) < 1e-12);
    CHECK(std::abs(dense_conjugate(p, s, 40.0, 1e-4) - analytic) < 1e-7);
  }
}

TEST_CASE("legendre transform errors") {
  const auto p = test::standard_profile();
  CHECK(throws_code(ErrorCode::SlopeOutOfRange, [&] { legendre_transform(p, 0.0); }));
  CHECK(throws_code(ErrorCode::SlopeOutOfRange, [&] { legendre_transform(p, 1.0000001); }));
  CHECK(throws_code(ErrorCode::NotConcave, [&] { legendre_transform(test::s_curve(), 0.1); }));
  CHECK(throws_code(ErrorCode::NotConcave, [&] { inverse_legendre(test::s_curve(), 0.1); }));
}

TEST_CASE("inverse legendre transform") {
  const auto p = test::standard_profile();
  CHECK(inverse_legendre(p, 0.0) == 1.0);
  CHECK(inverse_legendre(p, 0.25) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(inverse_legendre(p, 0.04) == doctest::Approx(0.64).epsilon(1e-10));
  for (double y : {0.04, 0.25, 0.7}) CHECK(std::abs(legendre_transform(p, inverse_legendre(p, y)) - y) < 1e-10);
  CHECK(throws_code(ErrorCode::InterceptOutOfRange, [&] { inverse_legendre(p, 1.0); }));
  CHECK(throws_code(ErrorCode::InterceptOutOfRange, [&] { inverse_legendre(p, -0.1); }));
}

TEST_CASE("conjugate on a tabulated concave profile tracks the analytic one") {
  const auto p = test::sampled_rational(1.0, 1.0, 200.0, 4000);
  CHECK(p.is_concave());
  for (double s : {0.04, 0.25, 0.5}) {
    CHECK(std::abs(legendre_transform(p, s) - std::pow(1.0 - std::sqrt(s), 2)) < 1e-4);
  }
}

TEST_CASE("convexity classification") {
  const auto rational = classify_profile(test::standard_profile());
  CHECK(rational.tag == ConvexityTag::Concave);
  CHECK(rational.inflection_times.empty());

  const auto s = classify_profile(test::s_curve());
  CHECK(s.tag == ConvexityTag::SingleInflection);
  REQUIRE(s.inflection_times.size() == 1);
  CHECK(std::abs(s.inflection_times[0] - 1.0 / std::sqrt(3.0)) < 0.1);
  CHECK_FALSE(test::s_curve().is_concave());

  const auto flat = classify_profile(ForecastProfile::tabulated({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}));
  CHECK(flat.tag == ConvexityTag::Concave);
  CHECK(flat.inflection_times.empty());

  const auto convex = ForecastProfile::tabulated({{0.0, 0.0}, {1.0, 0.1}, {2.0, 0.4}, {3.0, 0.9}});
  CHECK(classify_profile(convex).tag == ConvexityTag::General);
  CHECK_FALSE(convex.is_concave());

  CHECK_THROWS_AS(classify_profile(test::standard_profile(), 15), Error);
}

TEST_CASE("tangency identity, monotonicity and round trip on random rational profiles") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto p = ForecastProfile::rational(uniform(rng, 0.1, 5.0), uniform(rng, 0.1, 10.0));
    const double tau = uniform(rng, 0.01, 20.0) / p.gamma();
    const double lhs = legendre_transform(p, p.rate(tau));
    CHECK(std::abs(lhs - (p.value(tau) - tau * p.rate(tau))) < 1e-9);

    const double s = uniform(rng, 1e-3, 1.0) * p.rate(0.0);
    CHECK(std::abs(inverse_legendre(p, legendre_transform(p, s)) - s) < 1e-8 * std::max(1.0, p.rate(0.0)));
  }

  const auto p = test::standard_profile();
  std::vector<double> slopes;
  for (int i = 0; i < 100; ++i) slopes.push_back(uniform(rng, 1e-4, 1.0));
  std::sort(slopes.begin(), slopes.end());
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    CHECK(legendre_transform(p, slopes[i]) <= legendre_transform(p, slopes[i - 1]));
  }
}

TEST_CASE("rates match finite differences at random times") {
  Rng rng(12);
  const double h = 1e-6;
  const auto s = test::s_curve();
  for (int i = 0; i < 100; ++i) {
    const auto p = ForecastProfile::rational(uniform(rng, 0.1, 5.0), uniform(rng, 0.1, 10.0));
    const double t = uniform(rng, 2 * h, 10.0 / p.gamma());
    const double fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
    CHECK(std::abs(fd - p.rate(t)) <= 1e-5 * std::abs(p.rate(t)));

    const double ts = uniform(rng, 0.05, 9.9);
    const double fds = (s.value(ts + h) - s.value(ts - h)) / (2 * h);
    CHECK(std::abs(fds - s.rate(ts)) <= 1e-5 * std::max(std::abs(s.rate(ts)), 1e-3));
  }
}

TEST_CASE("profile csv") {
  std::istringstream good("t,f\n0,0\n1,0.5\n2,0.6\n");
  const auto p = read_profile_csv(good);
  CHECK(p.knots().size() == 3);
  CHECK(p.value(1.0) == 0.5);

  std::istringstream no_header("0,0\n1,0.5\n");
  CHECK_THROWS_AS(read_profile_csv(no_header), Error);
  std::istringstream bad_start("t,f\n0,0.1\n1,0.5\n");
  CHECK_THROWS_AS(read_profile_csv(bad_start), Error);
  std::istringstream garbage("t,f\n0,0\n1,abc\n");
  CHECK_THROWS_AS(read_profile_csv(garbage), Error);
  CHECK_THROWS_AS(load_profile_csv("/nonexistent/profile.csv"), Error);
}
