#pragma once

/// Minimal line plots as standalone SVG: axes, ticks, polylines, optional
/// error bands, linear or log axes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace wegnerlab::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band;  // half-width of a shaded band around y; empty for none
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

inline std::string tick_label(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.4g", v);
  return buffer;
}

inline std::string escape(const std::string& s) {
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

inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return ticks;
}

inline const char* colour(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return palette[i % 8];
}

}  // namespace detail

/// Render a plot. Points with non-finite coordinates (or nonpositive ones on
/// a log axis) are skipped.
inline std::string render_svg(const Plot& plot) {
  const double width = 720, height = 460;
  const double left = 80, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0) && (!plot.log_y || y > 0);
  };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      const double b = s.band.empty() ? 0.0 : s.band[i];
      const double lo = s.y[i] - b, hi = s.y[i] + b;
      if (usable(s.x[i], lo)) ymin = std::min(ymin, ty(lo));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(hi));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (xmax - xmin <= 0) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin <= 0) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.04 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << detail::fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  auto ticks = [&](double lo, double hi, bool log) {
    if (!log) return detail::linear_ticks(lo, hi);
    std::vector<double> t;
    for (double d = std::ceil(lo); d <= std::floor(hi); d += 1.0) t.push_back(d);
    if (t.size() < 2) return detail::linear_ticks(lo, hi);
    return t;
  };
  for (double t : ticks(xmin, xmax, plot.log_x)) {
    const double x = px(t);
    out << "<line x1=\"" << detail::fixed(x) << "\" y1=\"" << top + ph << "\" x2=\"" << detail::fixed(x)
        << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>";
    out << "<text x=\"" << detail::fixed(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << detail::tick_label(plot.log_x ? std::pow(10.0, t) : t) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax, plot.log_y)) {
    const double y = py(t);
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << detail::fixed(y) << "\" x2=\"" << left << "\" y2=\""
        << detail::fixed(y) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << left - 8 << "\" y=\"" << detail::fixed(y + 4) << "\" text-anchor=\"end\">"
        << detail::tick_label(plot.log_y ? std::pow(10.0, t) : t) << "</text>\n";
  }
  out << "<text x=\"" << detail::fixed(left + pw / 2) << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\">" << detail::escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(18 " << detail::fixed(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* c = detail::colour(k);
    if (!s.band.empty()) {
      std::ostringstream upper, lower;
      std::vector<std::string> lows;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double hi = s.y[i] + s.band[i], lo = s.y[i] - s.band[i];
        if (!usable(s.x[i], hi) || !usable(s.x[i], lo)) continue;
        upper << detail::fixed(px(tx(s.x[i]))) << ',' << detail::fixed(py(ty(hi))) << ' ';
        lows.push_back(detail::fixed(px(tx(s.x[i]))) + "," + detail::fixed(py(ty(lo))));
      }
      for (auto it = lows.rbegin(); it != lows.rend(); ++it) lower << *it << ' ';
      out << "<polygon points=\"" << upper.str() << lower.str() << "\" fill=\"" << c
          << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.x[i], s.y[i]))
        pts << detail::fixed(px(tx(s.x[i]))) << ',' << detail::fixed(py(ty(s.y[i]))) << ' ';
    out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << c
        << "\" stroke-width=\"1.5\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (usable(s.x[i], s.y[i]))
          out << "<circle cx=\"" << detail::fixed(px(tx(s.x[i]))) << "\" cy=\"" << detail::fixed(py(ty(s.y[i])))
              << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << detail::fixed(ly) << "\" x2=\"" << left + pw + 36
        << "\" y2=\"" << detail::fixed(ly) << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>";
    out << "<text x=\"" << left + pw + 42 << "\" y=\"" << detail::fixed(ly + 4) << "\">"
        << detail::escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace wegnerlab::io
