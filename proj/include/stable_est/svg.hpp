#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stable_est/common.hpp"

namespace stable_est {

struct SvgCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;  // raw (x, y), plotted on log-log axes
};

struct SvgMarker {
  std::string label;
  double x = 0.0;  // vertical dashed line position (raw units)
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string decade_label(int e) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "1e%d", e);
  return buf;
}

}  // namespace detail

// log-log line plot; fixed layout and formatting keep the output
// byte-identical across runs on the same inputs
inline void write_loglog_svg(const std::string& path, const std::vector<SvgCurve>& curves,
                             const std::vector<SvgMarker>& markers, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel) {
  if (curves.empty()) throw std::invalid_argument("write_loglog_svg: no curves");
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& c : curves) {
    if (c.points.empty()) throw std::invalid_argument("empty-curve: " + c.label);
    for (auto [x, y] : c.points) {
      if (x <= 0.0 || y <= 0.0) throw std::invalid_argument("nonpositive-values in curve " + c.label);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  for (const auto& m : markers) {
    if (m.x <= 0.0) throw std::invalid_argument("nonpositive-values in marker " + m.label);
    xmin = std::min(xmin, m.x);
    xmax = std::max(xmax, m.x);
  }
  double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
  double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
  if (lx1 - lx0 < 1e-9) {
    lx0 -= 0.5;
    lx1 += 0.5;
  }
  if (ly1 - ly0 < 1e-9) {
    ly0 -= 0.5;
    ly1 += 0.5;
  }
  // 4% padding in log units
  double px = 0.04 * (lx1 - lx0), py = 0.04 * (ly1 - ly0);
  lx0 -= px;
  lx1 += px;
  ly0 -= py;
  ly1 += py;

  const double width = 760, height = 520;
  const double left = 70, right = width - 170, top = 36, bottom = height - 58;
  auto sx = [&](double x) { return left + (std::log10(x) - lx0) / (lx1 - lx0) * (right - left); };
  auto sy = [&](double y) { return bottom - (std::log10(y) - ly0) / (ly1 - ly0) * (bottom - top); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const int palette_n = 6;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 760 520\" font-family=\"sans-serif\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"760\" height=\"520\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + detail::fmt2((left + right) / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" +
         title + "</text>\n";

  // gridlines and tick labels at decades
  int ex0 = static_cast<int>(std::ceil(lx0)), ex1 = static_cast<int>(std::floor(lx1));
  int ey0 = static_cast<int>(std::ceil(ly0)), ey1 = static_cast<int>(std::floor(ly1));
  int xstep = std::max(1, (ex1 - ex0) / 8 + ((ex1 - ex0) % 8 ? 1 : 0));
  int ystep = std::max(1, (ey1 - ey0) / 8 + ((ey1 - ey0) % 8 ? 1 : 0));
  for (int e = ex0; e <= ex1; e += xstep) {
    double gx = sx(std::pow(10.0, e));
    out += "<line x1=\"" + detail::fmt2(gx) + "\" y1=\"" + detail::fmt2(top) + "\" x2=\"" + detail::fmt2(gx) +
           "\" y2=\"" + detail::fmt2(bottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::fmt2(gx) + "\" y=\"" + detail::fmt2(bottom + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + detail::decade_label(e) + "</text>\n";
  }
  for (int e = ey0; e <= ey1; e += ystep) {
    double gy = sy(std::pow(10.0, e));
    out += "<line x1=\"" + detail::fmt2(left) + "\" y1=\"" + detail::fmt2(gy) + "\" x2=\"" + detail::fmt2(right) +
           "\" y2=\"" + detail::fmt2(gy) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::fmt2(left - 6) + "\" y=\"" + detail::fmt2(gy + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + detail::decade_label(e) + "</text>\n";
  }

  // axes
  out += "<line x1=\"" + detail::fmt2(left) + "\" y1=\"" + detail::fmt2(bottom) + "\" x2=\"" + detail::fmt2(right) +
         "\" y2=\"" + detail::fmt2(bottom) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + detail::fmt2(left) + "\" y1=\"" + detail::fmt2(top) + "\" x2=\"" + detail::fmt2(left) +
         "\" y2=\"" + detail::fmt2(bottom) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + detail::fmt2((left + right) / 2) + "\" y=\"" + detail::fmt2(height - 16) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + xlabel + "</text>\n";
  out += "<text x=\"18\" y=\"" + detail::fmt2((top + bottom) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" " +
         "transform=\"rotate(-90 18 " + detail::fmt2((top + bottom) / 2) + ")\">" + ylabel + "</text>\n";

  // vertical dashed threshold markers
  for (std::size_t i = 0; i < markers.size(); ++i) {
    double mx = sx(markers[i].x);
    out += "<line x1=\"" + detail::fmt2(mx) + "\" y1=\"" + detail::fmt2(top) + "\" x2=\"" + detail::fmt2(mx) +
           "\" y2=\"" + detail::fmt2(bottom) + "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";
    out += "<text x=\"" + detail::fmt2(mx + 3) + "\" y=\"" + detail::fmt2(top + 12 + 13.0 * (i % 3)) +
           "\" font-size=\"10\" fill=\"#555555\">" + markers[i].label + "</text>\n";
  }

  // one polyline per curve
  for (std::size_t c = 0; c < curves.size(); ++c) {
    out += "<polyline fill=\"none\" stroke=\"";
    out += palette[c % palette_n];
    out += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[c].points.size(); ++i) {
      if (i) out += " ";
      out += detail::fmt2(sx(curves[c].points[i].first)) + "," + detail::fmt2(sy(curves[c].points[i].second));
    }
    out += "\"/>\n";
  }

  // legend, right margin
  for (std::size_t c = 0; c < curves.size(); ++c) {
    double ly = top + 14 + 18.0 * c;
    out += "<line x1=\"" + detail::fmt2(right + 10) + "\" y1=\"" + detail::fmt2(ly - 4) + "\" x2=\"" +
           detail::fmt2(right + 34) + "\" y2=\"" + detail::fmt2(ly - 4) + "\" stroke=\"";
    out += palette[c % palette_n];
    out += "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + detail::fmt2(right + 38) + "\" y=\"" + detail::fmt2(ly) + "\" font-size=\"11\">" +
           curves[c].label + "</text>\n";
  }
  out += "</svg>\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("write_loglog_svg: cannot open " + path);
  file << out;
}

}  // namespace stable_est
