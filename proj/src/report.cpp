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

#include "eda/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

namespace eda
{
namespace
{

const char * kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                           "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string trim_number(double value)
{
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

}  // namespace

std::string render_line_chart_svg(
  const std::string & title, const std::string & x_label, const std::string & y_label,
  const std::vector<ChartSeries> & series)
{
  if (series.empty()) {
    throw std::invalid_argument("render_line_chart_svg: no series");
  }
  const double width = 640.0, height = 420.0;
  const double left = 70.0, right = 180.0, top = 40.0, bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const ChartSeries & s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_max <= x_min) {
    x_max = x_min + 1.0;
  }
  if (y_max <= y_min) {
    y_max = y_min + 1.0;
  }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  auto sx = [&](double v) { return left + (v - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double v) { return top + plot_h - (v - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"22\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fraction = static_cast<double>(i) / ticks;
    const double xv = x_min + fraction * (x_max - x_min);
    const double yv = y_min + fraction * (y_max - y_min);
    svg << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx(xv)
        << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(xv) << "\" y=\"" << top + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << trim_number(xv) << "</text>\n";
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left
        << "\" y2=\"" << sy(yv) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << trim_number(yv) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
      << " transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const ChartSeries & s = series[i];
    const char * color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (j > 0) {
        svg << ' ';
      }
      svg << sx(s.x[j]) << ',' << sy(s.y[j]);
    }
    svg << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      svg << "<circle cx=\"" << sx(s.x[j]) << "\" cy=\"" << sy(s.y[j])
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double legend_y = top + 14 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << legend_y << "\" x2=\""
        << left + plot_w + 34 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w + 40 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

int write_report(const std::vector<LayerMetricsRow> & rows, const std::string & out_dir)
{
  if (rows.empty()) {
    throw std::invalid_argument("write_report: no rows");
  }
  std::map<std::string, std::vector<const LayerMetricsRow *>> by_config;
  std::vector<std::string> order;
  for (const LayerMetricsRow & row : rows) {
    if (by_config.find(row.config_id) == by_config.end()) {
      order.push_back(row.config_id);
    }
    by_config[row.config_id].push_back(&row);
  }

  std::vector<ChartSeries> fde_series, miss_series;
  for (const std::string & id : order) {
    ChartSeries fde, miss;
    fde.label = id;
    miss.label = id;
    for (const LayerMetricsRow * row : by_config[id]) {
      fde.x.push_back(row->layer);
      fde.y.push_back(row->min_fde);
      miss.x.push_back(row->layer);
      miss.y.push_back(row->miss_rate);
    }
    fde_series.push_back(std::move(fde));
    miss_series.push_back(std::move(miss));
  }

  const std::filesystem::path dir(out_dir);
  atomic_write_text(
    (dir / "min_fde.svg").string(),
    render_line_chart_svg("Minimum Error by decoder layer", "layer", "minFDE", fde_series));
  atomic_write_text(
    (dir / "miss_rate.svg").string(),
    render_line_chart_svg("Miss Rate by decoder layer", "layer", "Miss Rate", miss_series));
  save_layer_metrics_csv((dir / "per_layer.csv").string(), rows);
  return static_cast<int>(order.size());
}

}  // namespace eda
