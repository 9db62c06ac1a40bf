#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ntz {

/// A (time, cumulative expected return) sample of a tabulated forecast.
struct Knot {
  double t = 0.0;
  double f = 0.0;
};

enum class ConvexityTag { Concave, SingleInflection, General };

struct ConvexityClass {
  ConvexityTag tag = ConvexityTag::Concave;
  std::vector<double> inflection_times;
};

/// Forecast term structure f(t): expected return from now to horizon t.
///
/// Two shapes are supported. The rational profile f(t) = f_inf * g t / (1 + g t)
/// is smooth and concave for f_inf > 0. A tabulated profile is a monotone
/// piecewise-cubic (Fritsch-Carlson) interpolant through knots starting at (0, 0),
/// continued flat beyond the last knot.
///
/// Profiles are immutable values; every query is const and thread-safe.
class ForecastProfile {
 public:
  enum class Kind { Rational, Tabulated };

  static ForecastProfile rational(double f_inf, double gamma);
  static ForecastProfile tabulated(std::vector<Knot> knots);

  Kind kind() const noexcept { return kind_; }
  /// Long-horizon value; the last knot value for tabulated profiles.
  double f_inf() const noexcept { return f_inf_; }
  /// Rate parameter of the rational profile; 0 for tabulated profiles.
  double gamma() const noexcept { return gamma_; }
  std::span<const Knot> knots() const noexcept { return knots_; }

  double value(double t) const;
  double rate(double t) const;

  /// Time for the curve to reach half its asymptote (1/gamma for rational).
  double characteristic_time() const noexcept { return char_time_; }
  /// Right end of the sampling window used by classification: 10/gamma or the last knot.
  double sampling_horizon() const noexcept;

  /// Concavity of the curve as classified at construction (f_inf >= 0 for rational).
  bool is_concave() const noexcept { return concave_; }

  /// +1 for f_inf >= 0, -1 otherwise.
  double orientation() const noexcept { return f_inf_ < 0.0 ? -1.0 : 1.0; }
  /// The curve -f(t). Closed-form solutions are computed on the positive side.
  ForecastProfile mirrored() const;
  /// Same shape rescaled to a new asymptote.
  ForecastProfile with_f_inf(double f_inf) const;

 private:
  ForecastProfile() = default;
  void finish();

  Kind kind_ = Kind::Rational;
  double f_inf_ = 0.0;
  double gamma_ = 0.0;
  std::vector<Knot> knots_;
  std::vector<double> slopes_;
  double char_time_ = 1.0;
  bool concave_ = true;
};

double eval_forecast(const ForecastProfile& profile, double t);
double eval_forecast_rate(const ForecastProfile& profile, double t);

/// Convex conjugate max_xi (f(xi) - s xi) for s in (0, f'(0)]: the t = 0
/// intercept of the tangent with slope s.
double legendre_transform(const ForecastProfile& profile, double slope);

/// Slope s whose tangent intercept equals `intercept`, 0 <= intercept < f_inf.
double inverse_legendre(const ForecastProfile& profile, double intercept);

ConvexityClass classify_profile(const ForecastProfile& profile, int n_samples = 512);

/// Reads a `t,f` CSV (header required, first row 0,0).
ForecastProfile read_profile_csv(std::istream& in);
ForecastProfile load_profile_csv(const std::string& path);

}  // namespace ntz
