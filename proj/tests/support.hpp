#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ntz/forecast.hpp"

namespace ntz::test {

inline std::string source_path(const std::string& rel) { return std::string(NTZ_SOURCE_DIR) + "/" + rel; }

/// t^2 / (1 + t^2) on 101 knots over [0, 10]: one inflection at 1/sqrt(3).
inline ForecastProfile s_curve() { return load_profile_csv(source_path("configs/scurve.csv")); }

inline ForecastProfile standard_profile() { return ForecastProfile::rational(1.0, 1.0); }

/// Rational curve sampled on knots, for exercising the tabulated code paths on a known concave shape.
inline ForecastProfile sampled_rational(double f_inf, double gamma, double t_max, int n) {
  std::vector<Knot> knots;
  for (int i = 0; i <= n; ++i) {
    const double t = t_max * i / n;
    knots.push_back({t, f_inf * gamma * t / (1.0 + gamma * t)});
  }
  return ForecastProfile::tabulated(std::move(knots));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ntz_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace ntz::test
