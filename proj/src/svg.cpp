// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "icclab/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "icclab/error.hpp"

namespace icclab {

namespace {

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 48.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Viridis sampled at five anchors, linearly blended.
std::string band_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> kAnchors{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (kAnchors.size() - 1);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), kAnchors.size() - 2);
  const double f = t - static_cast<double>(k);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(kAnchors[k][0] + f * (kAnchors[k + 1][0] - kAnchors[k][0]))),
                static_cast<int>(std::lround(kAnchors[k][1] + f * (kAnchors[k + 1][1] - kAnchors[k][1]))),
                static_cast<int>(std::lround(kAnchors[k][2] + f * (kAnchors[k + 1][2] - kAnchors[k][2]))));
  return buf;
}

// Maps grid index coordinates to pixels inside one subplot.
struct Frame {
  double left, top, width, height;
  std::size_t n_intra, n_inter;

  double px(double x) const { return left + (x + 0.5) / static_cast<double>(n_intra) * width; }
  double py(double y) const { return top + height - (y + 0.5) / static_cast<double>(n_inter) * height; }
};

double index_of(const std::vector<double>& axis, double v) {
  if (axis.size() < 2) return 0.0;
  return (v - axis.front()) / (axis[1] - axis[0]);
}

void emit_subplot(std::ostringstream& s, const VarianceGrid& grid,
                  const std::vector<DescentPath>& paths, const PlotOptions& o, double dx, double dy) {
  if (grid.n_intra() == 0 || grid.n_inter() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot plot an empty grid");
  }
  const Frame f{kMarginLeft, kMarginTop, o.width - kMarginLeft - kMarginRight,
                o.height - kMarginTop - kMarginBottom, grid.n_intra(), grid.n_inter()};
  const std::vector<double> levels = contour_levels(grid.values_mean, o.n_levels);
  s << "<g class=\"subplot\" transform=\"translate(" << fmt(dx) << "," << fmt(dy) << ")\">\n";
  s << "<text class=\"title\" x=\"" << fmt(f.left + f.width / 2) << "\" y=\"18\" text-anchor=\"middle\">"
    << escape_xml(o.title) << "</text>\n";

  if (o.filled) {
    s << "<g class=\"bands\" stroke=\"none\" shape-rendering=\"crispEdges\">\n";
    auto band = [&](double v) {
      return static_cast<std::size_t>(std::upper_bound(levels.begin(), levels.end(), v) - levels.begin());
    };
    const double denom = std::max<double>(1.0, static_cast<double>(levels.size()));
    for (std::size_t j = 0; j < grid.n_inter(); ++j) {
      std::size_t i = 0;
      while (i < grid.n_intra()) {
        const std::size_t b = band(grid.mean_at(i, j));
        std::size_t end = i + 1;
        while (end < grid.n_intra() && band(grid.mean_at(end, j)) == b) ++end;
        const double x0 = f.px(static_cast<double>(i) - 0.5);
        const double x1 = f.px(static_cast<double>(end) - 0.5);
        const double y1 = f.py(static_cast<double>(j) - 0.5);
        const double y0 = f.py(static_cast<double>(j) + 0.5);
        s << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0)
          << "\" height=\"" << fmt(y1 - y0) << "\" fill=\"" << band_color(static_cast<double>(b) / denom)
          << "\"/>\n";
        i = end;
      }
    }
    s << "</g>\n";
  }

  s << "<g class=\"contours\" fill=\"none\" stroke=\"" << (o.filled ? "#ffffff" : "#333333")
    << "\" stroke-width=\"0.8\">\n";
  for (double level : levels) {
    const auto segments = marching_squares(grid.values_mean, grid.n_intra(), grid.n_inter(), level);
    if (segments.empty()) continue;
    s << "<path class=\"contour\" data-level=\"" << tick_label(level) << "\" d=\"";
    for (const Segment& g : segments) {
      s << "M" << fmt(f.px(g.x0)) << " " << fmt(f.py(g.y0)) << "L" << fmt(f.px(g.x1)) << " " << fmt(f.py(g.y1));
    }
    s << "\"/>\n";
  }
  s << "</g>\n";

  // Axes with five ticks each.
  const double bottom = f.top + f.height;
  s << "<g class=\"axes\" stroke=\"#000000\" font-size=\"10\">\n";
  s << "<line class=\"axis\" x1=\"" << fmt(f.left) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(f.left + f.width)
    << "\" y2=\"" << fmt(bottom) << "\"/>\n";
  s << "<line class=\"axis\" x1=\"" << fmt(f.left) << "\" y1=\"" << fmt(f.top) << "\" x2=\"" << fmt(f.left)
    << "\" y2=\"" << fmt(bottom) << "\"/>\n";
  auto ticks = [](std::size_t n) {
    std::vector<std::size_t> t;
    const std::size_t k = std::min<std::size_t>(5, n);
    for (std::size_t q = 0; q < k; ++q) t.push_back(k == 1 ? 0 : q * (n - 1) / (k - 1));
    return t;
  };
  for (std::size_t i : ticks(grid.n_intra())) {
    const double x = f.px(static_cast<double>(i));
    s << "<text class=\"tick\" x=\"" << fmt(x) << "\" y=\"" << fmt(bottom + 14) << "\" text-anchor=\"middle\" stroke=\"none\">"
      << tick_label(grid.intra_values[i]) << "</text>\n";
  }
  for (std::size_t j : ticks(grid.n_inter())) {
    const double y = f.py(static_cast<double>(j));
    s << "<text class=\"tick\" x=\"" << fmt(f.left - 4) << "\" y=\"" << fmt(y + 3) << "\" text-anchor=\"end\" stroke=\"none\">"
      << tick_label(grid.inter_values[j]) << "</text>\n";
  }
  s << "<text class=\"axis-label\" x=\"" << fmt(f.left + f.width / 2) << "\" y=\"" << fmt(bottom + 32)
    << "\" text-anchor=\"middle\" stroke=\"none\">intra-class variance</text>\n";
  s << "<text class=\"axis-label\" x=\"14\" y=\"" << fmt(f.top + f.height / 2) << "\" text-anchor=\"middle\" stroke=\"none\" "
    << "transform=\"rotate(-90 14 " << fmt(f.top + f.height / 2) << ")\">inter-class variance</text>\n";
  s << "</g>\n";

  for (const DescentPath& p : paths) {
    if (p.points.empty()) continue;
    s << "<polyline class=\"descent-path\" fill=\"none\" stroke=\"#e41a1c\" stroke-width=\"1.5\" "
      << "stroke-dasharray=\"6,4\" points=\"";
    for (std::size_t k = 0; k < p.points.size(); ++k) {
      s << (k ? " " : "") << fmt(f.px(index_of(grid.intra_values, p.points[k].intra))) << ","
        << fmt(f.py(index_of(grid.inter_values, p.points[k].inter)));
    }
    s << "\"/>\n";
    s << "<circle class=\"start-marker\" cx=\"" << fmt(f.px(index_of(grid.intra_values, p.start.intra)))
      << "\" cy=\"" << fmt(f.py(index_of(grid.inter_values, p.start.inter)))
      << "\" r=\"3.5\" fill=\"#e41a1c\" stroke=\"#ffffff\"/>\n";
  }
  s << "</g>\n";
}

void open_document(std::ostringstream& s, double width, double height) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
    << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\" font-family=\"sans-serif\">\n"
    << "<rect class=\"background\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

}  // namespace

std::vector<Segment> marching_squares(const std::vector<double>& values, std::size_t rows,
                                      std::size_t cols, double level) {
  if (values.size() != rows * cols) throw Error(ErrorCode::kInvalidArgument, "field size != rows * cols");
  std::vector<Segment> out;
  if (rows < 2 || cols < 2) return out;
  auto at = [&](std::size_t i, std::size_t j) { return values[i * cols + j]; };
  for (std::size_t i = 0; i + 1 < rows; ++i) {
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      // Corners counter-clockwise from (i, j).
      const std::array<std::array<double, 2>, 4> pos{{{double(i), double(j)},
                                                      {double(i + 1), double(j)},
                                                      {double(i + 1), double(j + 1)},
                                                      {double(i), double(j + 1)}}};
      const std::array<double, 4> v{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) continue;
      std::array<std::array<double, 2>, 4> cross{};
      std::array<bool, 4> crossed{};
      int n = 0;
      for (int e = 0; e < 4; ++e) {
        const int p = e, q = (e + 1) % 4;
        if ((v[p] >= level) == (v[q] >= level)) continue;
        const double t = (level - v[p]) / (v[q] - v[p]);
        cross[e] = {pos[p][0] + t * (pos[q][0] - pos[p][0]), pos[p][1] + t * (pos[q][1] - pos[p][1])};
        crossed[e] = true;
        ++n;
      }
      auto seg = [&](int a, int b) { out.push_back({cross[a][0], cross[a][1], cross[b][0], cross[b][1]}); };
      if (n == 2) {
        int a = -1, b = -1;
        for (int e = 0; e < 4; ++e) {
          if (!crossed[e]) continue;
          (a < 0 ? a : b) = e;
        }
        seg(a, b);
      } else if (n == 4) {
        // Edge e joins corners e and e + 1; pairing (0,1),(2,3) cuts off
        // corners 1 and 3, pairing (3,0),(1,2) cuts off corners 0 and 2.
        const bool centre_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
        const bool corner0_in = v[0] >= level;
        if (centre_in == corner0_in) {
          seg(0, 1);
          seg(2, 3);
        } else {
          seg(3, 0);
          seg(1, 2);
        }
      }
    }
  }
  return out;
}

std::vector<double> contour_levels(const std::vector<double>& values, std::size_t n) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> levels;
  if (!(hi > lo)) return levels;
  for (std::size_t k = 1; k <= n; ++k) {
    levels.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n + 1));
  }
  return levels;
}

std::string render_contour_svg(const VarianceGrid& grid, const std::vector<DescentPath>& paths,
                               const PlotOptions& options) {
  std::ostringstream s;
  open_document(s, options.width, options.height);
  emit_subplot(s, grid, paths, options, 0.0, 0.0);
  s << "</svg>\n";
  return s.str();
}

std::string render_panel_svg(const std::vector<VarianceGrid>& grids,
                             const std::vector<std::string>& titles, std::size_t columns,
                             const PlotOptions& options) {
  if (columns == 0) throw Error(ErrorCode::kInvalidArgument, "panel needs at least one column");
  const std::size_t rows = (grids.size() + columns - 1) / columns;
  std::ostringstream s;
  open_document(s, options.width * static_cast<double>(std::min(columns, grids.size())),
                options.height * static_cast<double>(rows));
  for (std::size_t k = 0; k < grids.size(); ++k) {
    PlotOptions o = options;
    o.title = k < titles.size() ? titles[k] : "";
    emit_subplot(s, grids[k], {}, o, options.width * static_cast<double>(k % columns),
                 options.height * static_cast<double>(k / columns));
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace icclab
