// Copyright 2026 The IPP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "ipp/cli.hpp"

namespace ipp::cli {

namespace {

constexpr double kPlot = 560.0;   // drawing area side, px
constexpr double kMargin = 40.0;
constexpr double kLegend = 220.0;

struct Rgb {
  double r, g, b;
};

// Viridis control points.
constexpr std::array<Rgb, 5> kRamp = {{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
  return buf;
}

Rgb ramp(double u) {
  u = std::clamp(std::isfinite(u) ? u : 0.0, 0.0, 1.0) * (kRamp.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), kRamp.size() - 2);
  const double f = u - static_cast<double>(i);
  const Rgb& a = kRamp[i];
  const Rgb& b = kRamp[i + 1];
  return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

std::string robot_color(int id) {
  if (id >= 0 && id < static_cast<int>(kPalette.size())) return kPalette[static_cast<std::size_t>(id)];
  const int hue = static_cast<int>((static_cast<long long>(id) * 137) % 360 + 360) % 360;
  return "hsl(" + std::to_string(hue) + ",65%,40%)";
}

// Pixel coordinates rounded to 0.01 px.
std::string px(double v) { return format_double(std::round(v * 100.0) / 100.0); }

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

struct View {
  double x0, x1, y0, y1, scale;

  double sx(double x) const { return kMargin + (x - x0) * scale; }
  double sy(double y) const { return kMargin + (y1 - y) * scale; }
  double width() const { return (x1 - x0) * scale; }
  double height() const { return (y1 - y0) * scale; }
};

View make_view(const PathsFile& pf, const Field* field) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  const Environment* env = field ? &field->env() : (pf.env ? &*pf.env : nullptr);
  if (env) {
    x0 = env->lo(0);
    x1 = env->hi(0);
    y0 = env->spatial_dims() > 1 ? env->lo(1) : 0.0;
    y1 = env->spatial_dims() > 1 ? env->hi(1) : 1.0;
  } else {
    for (const Path& p : pf.paths) {
      x0 = std::min(x0, p.waypoints.col(0).minCoeff());
      x1 = std::max(x1, p.waypoints.col(0).maxCoeff());
      if (p.spatial_dims > 1) {
        y0 = std::min(y0, p.waypoints.col(1).minCoeff());
        y1 = std::max(y1, p.waypoints.col(1).maxCoeff());
      } else {
        y0 = std::min(y0, 0.0);
        y1 = std::max(y1, 1.0);
      }
    }
  }
  if (!(x1 > x0)) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  return {x0, x1, y0, y1, kPlot / std::max(x1 - x0, y1 - y0)};
}

/// Time column index of a path, or -1.
int time_column(const PathsFile& pf, const Path& p) {
  if (!pf.columns.empty()) {
    for (std::size_t c = 0; c < pf.columns.size(); ++c) {
      if (pf.columns[c] == "t" && static_cast<Eigen::Index>(c) < p.waypoints.cols()) return static_cast<int>(c);
    }
    return -1;
  }
  if (pf.env && pf.env->has_time()) return static_cast<int>(p.waypoints.cols()) - 1;
  return -1;
}

void heatmap(std::string& svg, const Field& field, const View& v) {
  const Environment& env = field.env();
  const auto& res = field.resolution();
  const int nx = res[0];
  const int ny = env.spatial_dims() > 1 ? res[1] : 1;
  // Average over every axis after the first two.
  std::vector<double> sum(static_cast<std::size_t>(nx * ny), 0.0);
  std::vector<int> count(sum.size(), 0);
  const Points& g = field.grid();
  const Eigen::Index inner = g.rows() / (static_cast<Eigen::Index>(nx) * ny);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    const std::size_t cell = static_cast<std::size_t>(r / inner);
    sum[cell] += field.values()[r];
    ++count[cell];
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t c = 0; c < sum.size(); ++c) {
    sum[c] /= count[c];
    lo = std::min(lo, sum[c]);
    hi = std::max(hi, sum[c]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const double dx = (env.hi(0) - env.lo(0)) / (nx - 1);
  const double dy = ny > 1 ? (env.hi(1) - env.lo(1)) / (ny - 1) : (v.y1 - v.y0);
  svg += "<g id=\"field\" data-min=\"" + format_double(lo) + "\" data-max=\"" + format_double(hi) + "\">\n";
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double cx = env.lo(0) + i * dx;
      const double cy = ny > 1 ? env.lo(1) + j * dy : 0.5 * (v.y0 + v.y1);
      const double xa = std::max(cx - dx / 2, v.x0), xb = std::min(cx + dx / 2, v.x1);
      const double ya = std::max(cy - dy / 2, v.y0), yb = std::min(cy + dy / 2, v.y1);
      const double val = sum[static_cast<std::size_t>(i * ny + j)];
      svg += "<rect x=\"" + px(v.sx(xa)) + "\" y=\"" + px(v.sy(yb)) + "\" width=\"" + px((xb - xa) * v.scale) +
             "\" height=\"" + px((yb - ya) * v.scale) + "\" fill=\"" + hex(ramp((val - lo) / span)) +
             "\"/>\n";
    }
  }
  svg += "</g>\n";
}

}  // namespace

std::string render_svg(const PathsFile& pf, const Field* field) {
  const View v = make_view(pf, field);
  const double width = 2 * kMargin + v.width() + kLegend;
  const double height = std::max(2 * kMargin + v.height(), 2 * kMargin + 40.0 + 22.0 * pf.paths.size() + 80.0);

  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  for (const Path& p : pf.paths) {
    const int tc = time_column(pf, p);
    if (tc < 0) continue;
    tmin = std::min(tmin, p.waypoints.col(tc).minCoeff());
    tmax = std::max(tmax, p.waypoints.col(tc).maxCoeff());
  }
  const bool timed = std::isfinite(tmin);

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" + px(height) +
         "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\">\n";
  if (timed) {
    svg += "<defs>\n<linearGradient id=\"time-ramp\" x1=\"0\" y1=\"0\" x2=\"1\" y2=\"0\" data-tmin=\"" +
           format_double(tmin) + "\" data-tmax=\"" + format_double(tmax) + "\">\n";
    for (std::size_t i = 0; i < kRamp.size(); ++i) {
      svg += "<stop offset=\"" + format_double(static_cast<double>(i) / (kRamp.size() - 1)) +
             "\" stop-color=\"" + hex(kRamp[i]) + "\"/>\n";
    }
    svg += "</linearGradient>\n</defs>\n";
  }
  svg += "<rect x=\"0\" y=\"0\" width=\"" + px(width) + "\" height=\"" + px(height) + "\" fill=\"#ffffff\"/>\n";
  if (field) heatmap(svg, *field, v);
  svg += "<rect x=\"" + px(kMargin) + "\" y=\"" + px(kMargin) + "\" width=\"" + px(v.width()) + "\" height=\"" +
         px(v.height()) + "\" fill=\"none\" stroke=\"#333333\"/>\n";

  svg += "<g id=\"paths\">\n";
  for (const Path& p : pf.paths) {
    const std::string color = robot_color(p.robot_id);
    const int tc = time_column(pf, p);
    std::string pts;
    for (Eigen::Index i = 0; i < p.waypoints.rows(); ++i) {
      const double y = p.spatial_dims > 1 ? p.waypoints(i, 1) : 0.5 * (v.y0 + v.y1);
      if (i) pts += ' ';
      pts += px(v.sx(p.waypoints(i, 0))) + "," + px(v.sy(y));
    }
    svg += "<polyline class=\"path\" data-robot=\"" + std::to_string(p.robot_id) + "\" points=\"" + pts +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    for (Eigen::Index i = 0; i < p.waypoints.rows(); ++i) {
      const double y = p.spatial_dims > 1 ? p.waypoints(i, 1) : 0.5 * (v.y0 + v.y1);
      std::string fill = color;
      std::string extra;
      if (tc >= 0) {
        const double t = p.waypoints(i, tc);
        fill = hex(ramp(tmax > tmin ? (t - tmin) / (tmax - tmin) : 0.0));
        extra = " data-t=\"" + format_double(t) + "\"";
      }
      svg += "<circle class=\"waypoint\" data-robot=\"" + std::to_string(p.robot_id) + "\"" + extra + " cx=\"" +
             px(v.sx(p.waypoints(i, 0))) + "\" cy=\"" + px(v.sy(y)) + "\" r=\"4\" fill=\"" + fill +
             "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    }
  }
  svg += "</g>\n";

  const double lx = 2 * kMargin + v.width();
  double ly = kMargin + 12.0;
  svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const Path& p : pf.paths) {
    const std::string len = format_double(std::round(path_length(p) * 1000.0) / 1000.0);
    svg += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" + px(lx + 20) + "\" y2=\"" + px(ly - 4) +
           "\" stroke=\"" + robot_color(p.robot_id) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + px(lx + 26) + "\" y=\"" + px(ly) + "\">" +
           escape("robot " + std::to_string(p.robot_id) + ": " + len + " m") + "</text>\n";
    ly += 22.0;
  }
  if (timed) {
    ly += 10.0;
    svg += "<text x=\"" + px(lx) + "\" y=\"" + px(ly) + "\">time [min]</text>\n";
    ly += 6.0;
    svg += "<rect x=\"" + px(lx) + "\" y=\"" + px(ly) + "\" width=\"150\" height=\"12\" fill=\"url(#time-ramp)\"/>\n";
    ly += 26.0;
    svg += "<text x=\"" + px(lx) + "\" y=\"" + px(ly) + "\">" + escape(format_double(tmin)) + "</text>\n";
    svg += "<text x=\"" + px(lx + 150) + "\" y=\"" + px(ly) + "\" text-anchor=\"end\">" +
           escape(format_double(tmax)) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace ipp::cli
