#pragma once

#include <optional>
#include <string>
#include <vector>

namespace contestlab::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Optional band drawn as a shaded polygon; same length as x when present.
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "#1f4e9c";
  bool dashed = false;
};

// Vertical reference line with a caption.
struct Marker {
  double x = 0.0;
  std::string label;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers;
  int width = 640;
  int height = 420;
};

struct Whisker {
  std::string label;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct WhiskerChart {
  std::string title;
  std::string y_label;
  std::vector<Whisker> items;
  // Horizontal reference line, e.g. the planted effect.
  std::optional<double> reference;
  std::string reference_label;
  int width = 640;
  int height = 420;
};

// NaN points break a line into segments. Throws ArgumentError on ragged series.
std::string render(const LineChart& chart);
std::string render(const WhiskerChart& chart);

}  // namespace contestlab::svg
