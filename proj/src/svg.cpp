#include "contestlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "contestlab/errors.hpp"

namespace contestlab::svg {

namespace {

constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round tick step: 1, 2 or 5 times a power of ten.
double tick_step(double span, int target) {
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10 * mag;
}

std::string tick_label(double v, double step) {
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-6 ? 0.0 : v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  int width, height;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (width - kLeft - kRight); }
  double py(double y) const { return height - kBottom - (y - y0) / (y1 - y0) * (height - kTop - kBottom); }
};

void expand(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double d = std::max(1e-9, std::abs(lo) * 0.05 + 1e-3);
    lo -= d;
    hi += d;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

std::string header(int w, int h, const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" +
         num(w / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label,
                 bool x_ticks) {
  std::string out;
  const double left = kLeft, right = f.width - kRight, top = kTop, bottom = f.height - kBottom;
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) +
         "\" height=\"" + num(bottom - top) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  const double ys = tick_step(f.y1 - f.y0, 6);
  for (double v = std::ceil(f.y0 / ys) * ys; v <= f.y1 + 1e-12; v += ys) {
    const double y = f.py(v);
    out += "<line x1=\"" + num(left) + "\" x2=\"" + num(right) + "\" y1=\"" + num(y) + "\" y2=\"" +
           num(y) + "\" stroke=\"#e5e5e5\"/>\n";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
           tick_label(v, ys) + "</text>\n";
  }
  if (x_ticks) {
    const double xs = tick_step(f.x1 - f.x0, 8);
    for (double v = std::ceil(f.x0 / xs) * xs; v <= f.x1 + 1e-12; v += xs) {
      const double x = f.px(v);
      out += "<line x1=\"" + num(x) + "\" x2=\"" + num(x) + "\" y1=\"" + num(bottom) + "\" y2=\"" +
             num(bottom + 5) + "\" stroke=\"#333\"/>\n";
      out += "<text x=\"" + num(x) + "\" y=\"" + num(bottom + 18) + "\" text-anchor=\"middle\">" +
             tick_label(v, xs) + "</text>\n";
    }
  }
  out += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(f.height - 15.0) +
         "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + num((top + bottom) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
  return out;
}

}  // namespace

std::string render(const LineChart& c) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : c.series) {
    if (s.x.size() != s.y.size()) throw ArgumentError("svg: series '" + s.label + "' is ragged");
    const bool band = !s.lower.empty();
    if (band && (s.lower.size() != s.x.size() || s.upper.size() != s.x.size()))
      throw ArgumentError("svg: band of '" + s.label + "' is ragged");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, band && std::isfinite(s.lower[i]) ? s.lower[i] : s.y[i]);
      y1 = std::max(y1, band && std::isfinite(s.upper[i]) ? s.upper[i] : s.y[i]);
    }
  }
  for (const auto& m : c.markers) {
    x0 = std::min(x0, m.x);
    x1 = std::max(x1, m.x);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 == x0) expand(x0, x1);
  expand(y0, y1);
  const Frame f{x0, x1, y0, y1, c.width, c.height};

  std::string out = header(c.width, c.height, c.title) + axes(f, c.x_label, c.y_label, true);
  for (const auto& s : c.series) {
    if (!s.lower.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.upper[i])) pts += num(f.px(s.x[i])) + "," + num(f.py(s.upper[i])) + " ";
      for (std::size_t i = s.x.size(); i-- > 0;)
        if (std::isfinite(s.lower[i])) pts += num(f.px(s.x[i])) + "," + num(f.py(s.lower[i])) + " ";
      out += "<polygon points=\"" + pts + "\" fill=\"" + s.color +
             "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    std::string d;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? "L" : "M") + num(f.px(s.x[i])) + " " + num(f.py(s.y[i])) + " ";
      pen_down = true;
    }
    out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\"" +
           (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
  }
  for (const auto& m : c.markers) {
    const double x = f.px(m.x);
    out += "<line x1=\"" + num(x) + "\" x2=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" y2=\"" +
           num(c.height - kBottom) + "\" stroke=\"#888\" stroke-dasharray=\"3 3\"/>\n";
    out += "<text x=\"" + num(x + 4) + "\" y=\"" + num(kTop + 14) + "\" fill=\"#555\">" +
           escape(m.label) + "</text>\n";
  }
  // Legend.
  double ly = kTop + 10;
  for (const auto& s : c.series) {
    const double lx = c.width - kRight - 170;
    out += "<line x1=\"" + num(lx) + "\" x2=\"" + num(lx + 24) + "\" y1=\"" + num(ly + 10) +
           "\" y2=\"" + num(ly + 10) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"" +
           (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 14) + "\">" + escape(s.label) +
           "</text>\n";
    ly += 18;
  }
  return out + "</svg>\n";
}

std::string render(const WhiskerChart& c) {
  double y0 = INFINITY, y1 = -INFINITY;
  for (const auto& w : c.items) {
    for (double v : {w.estimate, w.lower, w.upper})
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  }
  if (c.reference) {
    y0 = std::min(y0, *c.reference);
    y1 = std::max(y1, *c.reference);
  }
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  expand(y0, y1);
  const double n = static_cast<double>(std::max<std::size_t>(1, c.items.size()));
  const Frame f{0.0, n, y0, y1, c.width, c.height};

  std::string out = header(c.width, c.height, c.title) + axes(f, "", c.y_label, false);
  if (c.reference) {
    const double y = f.py(*c.reference);
    out += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(c.width - kRight) + "\" y1=\"" + num(y) +
           "\" y2=\"" + num(y) + "\" stroke=\"#999\" stroke-dasharray=\"5 4\"/>\n";
    if (!c.reference_label.empty())
      out += "<text x=\"" + num(c.width - kRight - 4) + "\" y=\"" + num(y - 5) +
             "\" text-anchor=\"end\" fill=\"#555\">" + escape(c.reference_label) + "</text>\n";
  }
  for (std::size_t i = 0; i < c.items.size(); ++i) {
    const auto& w = c.items[i];
    const double x = f.px(static_cast<double>(i) + 0.5);
    out += "<line x1=\"" + num(x) + "\" x2=\"" + num(x) + "\" y1=\"" + num(f.py(w.lower)) +
           "\" y2=\"" + num(f.py(w.upper)) + "\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
    for (double v : {w.lower, w.upper})
      out += "<line x1=\"" + num(x - 6) + "\" x2=\"" + num(x + 6) + "\" y1=\"" + num(f.py(v)) +
             "\" y2=\"" + num(f.py(v)) + "\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
    out += "<circle cx=\"" + num(x) + "\" cy=\"" + num(f.py(w.estimate)) +
           "\" r=\"4\" fill=\"#1f4e9c\"/>\n";
    out += "<text transform=\"translate(" + num(x) + "," + num(c.height - kBottom + 14) +
           ") rotate(30)\" font-size=\"10\">" + escape(w.label) + "</text>\n";
  }
  return out + "</svg>\n";
}

}  // namespace contestlab::svg
