#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "flyatom/io/units.hpp"
#include "flyatom/thermal_mc.hpp"

namespace flyatom::io {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_low;   // optional error bars, same length as y
  std::vector<double> y_high;
  bool markers = true;
  bool line = false;
  std::string color;
};

struct PlotStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 0;   // 0: 640
  int height = 0;  // 0: 420
  bool log_x = false;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
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

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad(bool log) {
    if (!std::isfinite(lo)) {
      lo = log ? 0.1 : 0.0;
      hi = 1.0;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
      if (log) {
        lo /= 2.0;
        hi *= 2.0;
      } else {
        const double d = std::max(0.5, 0.1 * std::abs(lo));
        lo -= d;
        hi += d;
      }
    }
  }
};

}  // namespace detail

/// Self-contained SVG 1.1 line/marker plot. Overlay polylines carry their raw
/// data in data-x / data-y attributes.
inline std::string render_svg(const std::vector<Series>& series, const PlotStyle& style_in = {}) {
  using detail::fmt;
  PlotStyle style = style_in;
  if (style.width <= 0) style.width = 640;
  if (style.height <= 0) style.height = 420;
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = style.width - ml - mr;
  const double ph = style.height - mt - mb;

  detail::Range xr, yr;
  for (const auto& s : series) {
    for (double x : s.x)
      if (!style.log_x || x > 0) xr.add(x);
    for (double y : s.y) yr.add(y);
    for (double y : s.y_low) yr.add(y);
    for (double y : s.y_high) yr.add(y);
  }
  const bool log_x = style.log_x && std::isfinite(xr.lo) && xr.lo > 0;
  xr.pad(log_x);
  yr.pad(false);
  auto tx = [&](double x) {
    const double f = log_x ? (std::log10(x) - std::log10(xr.lo)) / (std::log10(xr.hi) - std::log10(xr.lo))
                           : (x - xr.lo) / (xr.hi - xr.lo);
    return ml + f * pw;
  };
  auto ty = [&](double y) { return mt + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
       "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
       std::to_string(style.height) + "\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty())
    o += "<text x=\"" + fmt(style.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::xml_escape(style.title) + "</text>\n";
  o += "<rect class=\"frame\" x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) + "\" height=\"" +
       fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double py = ty(fy);
    o += "<line x1=\"" + fmt(ml - 4) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(ml) + "\" y2=\"" + fmt(py) +
         "\" stroke=\"black\"/>";
    o += "<text x=\"" + fmt(ml - 7) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
         detail::tick_label(fy) + "</text>\n";
    const double fx = log_x ? std::pow(10.0, std::log10(xr.lo) + (std::log10(xr.hi) - std::log10(xr.lo)) * i / 4.0)
                            : xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double px = tx(fx);
    o += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" + fmt(px) + "\" y2=\"" + fmt(mt + ph + 4) +
         "\" stroke=\"black\"/>";
    o += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(mt + ph + 17) + "\" text-anchor=\"middle\" font-size=\"11\">" +
         detail::tick_label(fx) + "</text>\n";
  }
  o += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(style.height - 12.0) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + detail::xml_escape(style.x_label) + "</text>\n";
  o += "<text transform=\"translate(16," + fmt(mt + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" +
       detail::xml_escape(style.y_label) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = s.color.empty() ? detail::palette(si) : s.color;
    o += "<g class=\"series\" data-name=\"" + detail::xml_escape(s.name) + "\">\n";
    const bool bars = s.y_low.size() == s.y.size() && s.y_high.size() == s.y.size();
    if (s.line) {
      std::string pts, dx, dy;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (log_x && !(s.x[i] > 0)) continue;
        pts += fmt(tx(s.x[i])) + "," + fmt(ty(s.y[i])) + " ";
        dx += (dx.empty() ? "" : " ") + format_double(s.x[i]);
        dy += (dy.empty() ? "" : " ") + format_double(s.y[i]);
      }
      o += "<polyline class=\"overlay\" data-name=\"" + detail::xml_escape(s.name) + "\" data-x=\"" + dx +
           "\" data-y=\"" + dy + "\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (log_x && !(s.x[i] > 0)) continue;
      const double px = tx(s.x[i]);
      if (bars)
        o += "<line class=\"errorbar\" x1=\"" + fmt(px) + "\" y1=\"" + fmt(ty(s.y_low[i])) + "\" x2=\"" + fmt(px) +
             "\" y2=\"" + fmt(ty(s.y_high[i])) + "\" stroke=\"" + color + "\"/>\n";
      if (s.markers)
        o += "<circle class=\"point\" cx=\"" + fmt(px) + "\" cy=\"" + fmt(ty(s.y[i])) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    o += "</g>\n";
  }

  double ly = mt + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    if (series[si].name.empty()) continue;
    const std::string color = series[si].color.empty() ? detail::palette(si) : series[si].color;
    o += "<rect x=\"" + fmt(ml + pw - 150) + "\" y=\"" + fmt(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" + color +
         "\"/><text x=\"" + fmt(ml + pw - 135) + "\" y=\"" + fmt(ly) + "\" font-size=\"11\">" +
         detail::xml_escape(series[si].name) + "</text>\n";
    ly += 15;
  }
  o += "</svg>\n";
  return o;
}

/// Sweep markers with Wilson error bars plus optional overlay curves.
inline std::string emit_plot(const SweepResult& sweep, const PlotStyle& style_in = {},
                             const std::vector<Series>& overlays = {}) {
  PlotStyle style = style_in;
  if (style.x_label.empty()) {
    if (sweep.control_name == "a_over_amax") style.x_label = "a / a_max";
    else if (sweep.control_name == "uc_over_u0") style.x_label = "U_c / U_0";
    else if (sweep.control_name == "b_over_d") style.x_label = "b / d";
    else style.x_label = sweep.control_name.empty() ? "control" : sweep.control_name;
  }
  if (style.y_label.empty()) style.y_label = "success probability";
  Series data;
  data.name = "simulation";
  for (const auto& p : sweep.points) {
    data.x.push_back(p.control_value);
    data.y.push_back(p.p_hat);
    data.y_low.push_back(p.ci_low);
    data.y_high.push_back(p.ci_high);
  }
  std::vector<Series> all{data};
  for (auto s : overlays) {
    s.line = true;
    s.markers = false;
    all.push_back(std::move(s));
  }
  return render_svg(all, style);
}

}  // namespace flyatom::io
