// Copyright 2026 The EDA Lab Authors
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

#ifndef EDA__REPORT_HPP_
#define EDA__REPORT_HPP_

#include <string>
#include <vector>

#include "eda/serialization.hpp"

namespace eda
{

struct ChartSeries
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal standalone SVG line chart (axes, ticks, legend, one polyline
/// per series).
std::string render_line_chart_svg(
  const std::string & title, const std::string & x_label, const std::string & y_label,
  const std::vector<ChartSeries> & series);

/// Turns per-layer metric rows into plots/min_fde.{svg,csv} and
/// plots/miss_rate.{svg,csv}, one series per config id. Returns the
/// number of series plotted.
int write_report(const std::vector<LayerMetricsRow> & rows, const std::string & out_dir);

}  // namespace eda

#endif  // EDA__REPORT_HPP_
