#pragma once

#include <string>
#include <vector>

namespace ntz::cli {

/// Minimal self-contained line/band chart. Output depends only on the data,
/// so identical inputs give byte-identical files.
class SvgChart {
 public:
  SvgChart(std::string title, std::string x_label, std::string y_label);

  void set_log_axes(bool log_x, bool log_y);
  void add_line(std::string name, std::vector<double> xs, std::vector<double> ys, std::string color,
                bool dashed = false);
  void add_points(std::string name, std::vector<double> xs, std::vector<double> ys, std::string color);
  /// Shaded region between lo and hi, drawn as a step band.
  void add_band(std::string name, std::vector<double> xs, std::vector<double> lo, std::vector<double> hi,
                std::string color);

  std::string render(int width = 720, int height = 440) const;

 private:
  enum class Style { Line, Dashed, Points, Band };
  struct Series {
    std::string name;
    Style style;
    std::vector<double> xs, ys, ys2;
    std::string color;
  };

  std::string title_, x_label_, y_label_;
  bool log_x_ = false, log_y_ = false;
  std::vector<Series> series_;
};

}  // namespace ntz::cli
