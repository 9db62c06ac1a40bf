#include "ntz/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "ntz/error.hpp"
#include "ntz/roots.hpp"

namespace ntz {

namespace {

constexpr int kConcavitySamples = 512;

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Fritsch-Carlson: quadratic-exact three-point slopes, zeroed at data extrema,
// then scaled into the monotonicity region alpha^2 + beta^2 <= 9.
std::vector<double> monotone_slopes(const std::vector<Knot>& k) {
  const std::size_t n = k.size();
  std::vector<double> m(n, 0.0);
  if (n < 2) return m;
  std::vector<double> h(n - 1);
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = k[i + 1].t - k[i].t;
    d[i] = (k[i + 1].f - k[i].f) / h[i];
  }
  if (n == 2) {
    m[0] = m[1] = d[0];
    return m;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m[i] = d[i - 1] * d[i] <= 0.0 ? 0.0 : (h[i] * d[i - 1] + h[i - 1] * d[i]) / (h[i - 1] + h[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    const double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    return sign_of(s) == sign_of(d0) ? s : 0.0;
  };
  m[0] = end_slope(h[0], h[1], d[0], d[1]);
  m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double alpha = m[i] / d[i];
    const double beta = m[i + 1] / d[i];
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m[i] = tau * alpha * d[i];
      m[i + 1] = tau * beta * d[i];
    }
  }
  return m;
}

std::vector<double> sampling_grid(const ForecastProfile& profile, int n) {
  const double horizon = profile.sampling_horizon();
  const int n_lin = n / 2;
  const int n_geo = n - n_lin;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n_lin; ++i) grid.push_back(horizon * i / (n_lin - 1));
  const double start = horizon * 1e-4;
  const double ratio = std::pow(horizon / start, 1.0 / (n_geo - 1));
  double t = start;
  for (int i = 0; i < n_geo; ++i, t *= ratio) grid.push_back(std::min(t, horizon));
  std::sort(grid.begin(), grid.end());
  auto close = [horizon](double a, double b) { return b - a <= 1e-12 * horizon; };
  grid.erase(std::unique(grid.begin(), grid.end(), close), grid.end());
  return grid;
}

}  // namespace

ForecastProfile ForecastProfile::rational(double f_inf, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "rational profile needs gamma > 0");
  }
  if (!std::isfinite(f_inf)) throw Error(ErrorCode::InvalidArgument, "rational profile needs finite f_inf");
  ForecastProfile p;
  p.kind_ = Kind::Rational;
  p.f_inf_ = f_inf;
  p.gamma_ = gamma;
  p.finish();
  return p;
}

ForecastProfile ForecastProfile::tabulated(std::vector<Knot> knots) {
  if (knots.empty()) throw Error(ErrorCode::InvalidArgument, "tabulated profile needs at least one knot");
  if (knots.front().t != 0.0 || knots.front().f != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "tabulated profile must start at (0, 0)");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].t > knots[i - 1].t)) {
      throw Error(ErrorCode::InvalidArgument, "tabulated knot times must be strictly increasing");
    }
    if (!std::isfinite(knots[i].f) || !std::isfinite(knots[i].t)) {
      throw Error(ErrorCode::InvalidArgument, "tabulated knots must be finite");
    }
  }
  ForecastProfile p;
  p.kind_ = Kind::Tabulated;
  p.knots_ = std::move(knots);
  p.f_inf_ = p.knots_.back().f;
  p.slopes_ = monotone_slopes(p.knots_);
  p.finish();
  return p;
}

void ForecastProfile::finish() {
  if (kind_ == Kind::Rational) {
    char_time_ = 1.0 / gamma_;
    concave_ = f_inf_ >= 0.0;
    return;
  }
  const double last = knots_.back().t;
  char_time_ = last > 0.0 ? last : 1.0;
  if (f_inf_ != 0.0 && last > 0.0) {
    const double half = 0.5 * f_inf_;
    auto reached = [&](double t) { return (value(t) - half) * orientation(); };
    if (reached(last) >= 0.0) char_time_ = find_root(reached, 0.0, last, 1e-12 * last).x;
  }
  concave_ = knots_.size() < 2 || classify_profile(*this, kConcavitySamples).tag == ConvexityTag::Concave;
}

double ForecastProfile::sampling_horizon() const noexcept {
  if (kind_ == Kind::Rational) return 10.0 / gamma_;
  return knots_.back().t > 0.0 ? knots_.back().t : 1.0;
}

double ForecastProfile::value(double t) const {
  if (t < 0.0) throw Error(ErrorCode::NegativeTime, "forecast evaluated at t < 0");
  if (kind_ == Kind::Rational) {
    if (std::isinf(t)) return f_inf_;
    const double gt = gamma_ * t;
    return f_inf_ * gt / (1.0 + gt);
  }
  if (t >= knots_.back().t) return knots_.back().f;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double x, const Knot& k) { return x < k.t; });
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[j + 1].t - knots_[j].t;
  const double s = (t - knots_[j].t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * knots_[j].f + (s3 - 2 * s2 + s) * h * slopes_[j] +
         (-2 * s3 + 3 * s2) * knots_[j + 1].f + (s3 - s2) * h * slopes_[j + 1];
}

double ForecastProfile::rate(double t) const {
  if (t < 0.0) throw Error(ErrorCode::NegativeTime, "forecast rate evaluated at t < 0");
  if (kind_ == Kind::Rational) {
    if (std::isinf(t)) return 0.0;
    const double u = 1.0 + gamma_ * t;
    return f_inf_ * gamma_ / (u * u);
  }
  if (t >= knots_.back().t) return 0.0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double x, const Knot& k) { return x < k.t; });
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[j + 1].t - knots_[j].t;
  const double s = (t - knots_[j].t) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * knots_[j].f + (3 * s2 - 4 * s + 1) * h * slopes_[j] +
          (-6 * s2 + 6 * s) * knots_[j + 1].f + (3 * s2 - 2 * s) * h * slopes_[j + 1]) /
         h;
}

ForecastProfile ForecastProfile::mirrored() const {
  if (kind_ == Kind::Rational) return rational(-f_inf_, gamma_);
  std::vector<Knot> k = knots_;
  for (auto& knot : k) knot.f = -knot.f;
  return tabulated(std::move(k));
}

ForecastProfile ForecastProfile::with_f_inf(double f_inf) const {
  if (kind_ == Kind::Rational) return rational(f_inf, gamma_);
  if (f_inf_ == 0.0) throw Error(ErrorCode::InvalidArgument, "cannot rescale a flat tabulated profile");
  std::vector<Knot> k = knots_;
  const double scale = f_inf / f_inf_;
  for (auto& knot : k) knot.f *= scale;
  return tabulated(std::move(k));
}

double eval_forecast(const ForecastProfile& profile, double t) { return profile.value(t); }

double eval_forecast_rate(const ForecastProfile& profile, double t) { return profile.rate(t); }

double legendre_transform(const ForecastProfile& profile, double slope) {
  if (!profile.is_concave()) throw Error(ErrorCode::NotConcave, "legendre_transform needs a concave profile");
  const double rate0 = profile.rate(0.0);
  if (!(slope > 0.0) || slope > rate0) {
    throw Error(ErrorCode::SlopeOutOfRange, "slope must lie in (0, f'(0)]");
  }
  if (slope == rate0) return 0.0;
  // f' is non-increasing, so the tangency point is the crossing f'(xi) = slope.
  auto excess = [&](double xi) { return profile.rate(xi) - slope; };
  double hi;
  if (profile.kind() == ForecastProfile::Kind::Tabulated) {
    hi = profile.knots().back().t;
  } else {
    hi = expand_bracket([&](double t) { return excess(t) < 0.0; }, profile.characteristic_time());
  }
  const double xi = find_root(excess, 0.0, hi, 1e-12 * std::max(1.0, hi)).x;
  return profile.value(xi) - slope * xi;
}

double inverse_legendre(const ForecastProfile& profile, double intercept) {
  if (!profile.is_concave()) throw Error(ErrorCode::NotConcave, "inverse_legendre needs a concave profile");
  if (!(intercept >= 0.0) || intercept >= profile.f_inf()) {
    throw Error(ErrorCode::InterceptOutOfRange, "intercept must lie in [0, f_inf): no tangent exists");
  }
  const double rate0 = profile.rate(0.0);
  if (intercept == 0.0) return rate0;
  // The conjugate decreases from f_inf (s -> 0) to 0 (s = f'(0)).
  double lo = rate0;
  int halvings = 0;
  do {
    lo *= 0.5;
    if (++halvings > 1000) throw Error(ErrorCode::InterceptOutOfRange, "intercept too close to f_inf");
  } while (legendre_transform(profile, lo) <= intercept);
  auto residual = [&](double s) { return legendre_transform(profile, s) - intercept; };
  return find_root(residual, lo, rate0, 1e-14 * rate0).x;
}

ConvexityClass classify_profile(const ForecastProfile& profile, int n_samples) {
  if (n_samples < 16) throw Error(ErrorCode::InvalidArgument, "classify_profile needs at least 16 samples");
  // Tabulated curves are judged on their knots: the interpolant's second
  // derivative jumps at every knot and flickers in sign near a true inflection.
  std::vector<double> grid;
  if (profile.kind() == ForecastProfile::Kind::Tabulated) {
    for (const auto& k : profile.knots()) grid.push_back(k.t);
  } else {
    grid = sampling_grid(profile, n_samples);
  }
  std::vector<double> f(grid.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f[i] = profile.value(grid[i]);
    scale = std::max(scale, std::abs(f[i]));
  }
  const double tol = 1e-10 * scale;

  ConvexityClass out;
  int last_sign = 0;
  double last_t = 0.0;
  bool any_positive = false;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double h0 = grid[i] - grid[i - 1];
    const double h1 = grid[i + 1] - grid[i];
    // Slope change rescaled to the mean spacing: a second difference in f units.
    const double d2 = ((f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0) * 0.5 * (h0 + h1);
    const int s = d2 > tol ? 1 : (d2 < -tol ? -1 : 0);
    if (s == 0) continue;
    if (s > 0) any_positive = true;
    if (last_sign != 0 && s != last_sign) out.inflection_times.push_back(0.5 * (last_t + grid[i]));
    last_sign = s;
    last_t = grid[i];
  }
  switch (out.inflection_times.size()) {
    case 0:
      out.tag = any_positive ? ConvexityTag::General : ConvexityTag::Concave;
      break;
    case 1:
      out.tag = ConvexityTag::SingleInflection;
      break;
    default:
      out.tag = ConvexityTag::General;
  }
  return out;
}

ForecastProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "profile CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,f") throw Error(ErrorCode::InvalidArgument, "profile CSV header must be 't,f'");
  std::vector<Knot> knots;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    Knot k;
    char comma = 0;
    if (!(ss >> k.t >> comma >> k.f) || comma != ',') {
      throw Error(ErrorCode::InvalidArgument, "bad profile CSV row " + std::to_string(row));
    }
    knots.push_back(k);
  }
  return ForecastProfile::tabulated(std::move(knots));
}

ForecastProfile load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open profile CSV " + path);
  return read_profile_csv(in);
}

}  // namespace ntz
