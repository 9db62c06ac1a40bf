#include "ntz/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ntz::cli {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double tr(double v) const { return log ? std::log10(v) : v; }

  void fit(double mn, double mx) {
    if (!(mn <= mx)) {
      mn = log ? 1.0 : 0.0;
      mx = log ? 10.0 : 1.0;
    }
    lo = tr(mn);
    hi = tr(mx);
    if (log) {
      lo = std::floor(lo);
      hi = std::ceil(hi);
      if (hi <= lo) hi = lo + 1.0;
      return;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
      for (double e = lo; e <= hi + 1e-9; e += step) t.push_back(e);
      return t;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (step >= raw) break;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return t;
  }

  std::string label(double v) const { return log ? "1e" + fmt("%.0f", v) : fmt("%.4g", v); }
};

}  // namespace

SvgChart::SvgChart(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgChart::set_log_axes(bool log_x, bool log_y) {
  log_x_ = log_x;
  log_y_ = log_y;
}

void SvgChart::add_line(std::string name, std::vector<double> xs, std::vector<double> ys, std::string color,
                        bool dashed) {
  series_.push_back({std::move(name), dashed ? Style::Dashed : Style::Line, std::move(xs), std::move(ys), {},
                     std::move(color)});
}

void SvgChart::add_points(std::string name, std::vector<double> xs, std::vector<double> ys, std::string color) {
  series_.push_back({std::move(name), Style::Points, std::move(xs), std::move(ys), {}, std::move(color)});
}

void SvgChart::add_band(std::string name, std::vector<double> xs, std::vector<double> lo, std::vector<double> hi,
                        std::string color) {
  series_.push_back({std::move(name), Style::Band, std::move(xs), std::move(lo), std::move(hi), std::move(color)});
}

std::string SvgChart::render(int width, int height) const {
  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  Axis ax{log_x_}, ay{log_y_};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!ax.usable(s.xs[i])) continue;
      for (double y : {s.ys[i], s.ys2.empty() ? s.ys[i] : s.ys2[i]}) {
        if (!ay.usable(y)) continue;
        xmin = std::min(xmin, s.xs[i]);
        xmax = std::max(xmax, s.xs[i]);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  ax.fit(xmin, xmax);
  ay.fit(ymin, ymax);
  auto X = [&](double v) { return left + (ax.tr(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto Y = [&](double v) { return top + ph - (ay.tr(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
    << "</text>\n";

  for (double t : ax.ticks()) {
    const double x = left + (t - ax.lo) / (ax.hi - ax.lo) * pw;
    o << "<line x1=\"" << px(x) << "\" y1=\"" << px(top) << "\" x2=\"" << px(x) << "\" y2=\"" << px(top + ph)
      << "\" stroke=\"#e4e4e4\"/>\n";
    o << "<text x=\"" << px(x) << "\" y=\"" << px(top + ph + 16) << "\" text-anchor=\"middle\">" << ax.label(t)
      << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = top + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
    o << "<line x1=\"" << px(left) << "\" y1=\"" << px(y) << "\" x2=\"" << px(left + pw) << "\" y2=\"" << px(y)
      << "\" stroke=\"#e4e4e4\"/>\n";
    o << "<text x=\"" << px(left - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">" << ay.label(t)
      << "</text>\n";
  }
  o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << px(height - 12.0) << "\" text-anchor=\"middle\">"
    << escape(x_label_) << "</text>\n";
  o << "<text transform=\"translate(16," << px(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label_) << "</text>\n";

  for (const auto& s : series_) {
    if (s.style == Style::Band) {
      // Step band: each value holds until the next x.
      std::string upper, lower;
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        const double x0 = X(s.xs[i]);
        const double x1 = X(i + 1 < s.xs.size() ? s.xs[i + 1] : s.xs[i]);
        upper += px(x0) + ',' + px(Y(s.ys2[i])) + ' ' + px(x1) + ',' + px(Y(s.ys2[i])) + ' ';
        lower = px(x1) + ',' + px(Y(s.ys[i])) + ' ' + px(x0) + ',' + px(Y(s.ys[i])) + ' ' + lower;
      }
      o << "<polygon points=\"" << upper << lower << "\" fill=\"" << s.color
        << "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
      continue;
    }
    if (s.style == Style::Points) {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!ax.usable(s.xs[i]) || !ay.usable(s.ys[i])) continue;
        o << "<circle cx=\"" << px(X(s.xs[i])) << "\" cy=\"" << px(Y(s.ys[i])) << "\" r=\"3.5\" fill=\"" << s.color
          << "\"/>\n";
      }
      continue;
    }
    std::string pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!ax.usable(s.xs[i]) || !ay.usable(s.ys[i])) continue;
      pts += px(X(s.xs[i])) + ',' + px(Y(s.ys[i])) + ' ';
    }
    o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
      << (s.style == Style::Dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
  }

  double ly = top + 10;
  for (const auto& s : series_) {
    const double lx = left + pw + 12;
    if (s.style == Style::Points) {
      o << "<circle cx=\"" << px(lx + 10) << "\" cy=\"" << px(ly) << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
    } else if (s.style == Style::Band) {
      o << "<rect x=\"" << px(lx) << "\" y=\"" << px(ly - 5) << "\" width=\"20\" height=\"10\" fill=\"" << s.color
        << "\" fill-opacity=\"0.25\"/>\n";
    } else {
      o << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(lx + 20) << "\" y2=\"" << px(ly)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
        << (s.style == Style::Dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
    }
    o << "<text x=\"" << px(lx + 26) << "\" y=\"" << px(ly + 4) << "\">" << escape(s.name) << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ntz::cli
