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

// SVG figures of variance grids: filled level bands, contour lines traced by
// marching squares, labelled axes and dashed descent paths with start
// markers. Output depends only on the inputs, so reruns are byte-identical.

#ifndef ICCLAB_SVG_HPP_
#define ICCLAB_SVG_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "icclab/landscape.hpp"

namespace icclab {

// A contour piece in grid index coordinates: x runs along the rows
// (intra), y along the columns (inter).
struct Segment {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

// Iso-line of a row-major [rows x cols] field at `level`. Each cell
// contributes zero, one or two segments; saddles are resolved by the cell
// average.
std::vector<Segment> marching_squares(const std::vector<double>& values, std::size_t rows,
                                      std::size_t cols, double level);

// n levels evenly spaced strictly inside [min, max] of the finite values.
std::vector<double> contour_levels(const std::vector<double>& values, std::size_t n);

struct PlotOptions {
  std::string title;
  std::size_t n_levels = 12;
  bool filled = true;
  double width = 480.0;
  double height = 400.0;
};

std::string render_contour_svg(const VarianceGrid& grid, const std::vector<DescentPath>& paths,
                               const PlotOptions& options);

// One subplot group per grid, `columns` per row, titled in order.
std::string render_panel_svg(const std::vector<VarianceGrid>& grids,
                             const std::vector<std::string>& titles, std::size_t columns,
                             const PlotOptions& options);

}  // namespace icclab

#endif  // ICCLAB_SVG_HPP_
