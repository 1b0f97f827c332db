// Copyright 2026 The seqreg Authors.
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

#include "seqreg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace seqreg {
namespace {

constexpr double kWidth = 640.0, kHeight = 400.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string svg_line_plot(std::span<const double> x,
                          std::span<const PlotSeries> series,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (double v : x) {
    x0 = std::min(x0, v);
    x1 = std::max(x1, v);
  }
  for (const PlotSeries& s : series) {
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!(x0 < x1)) {
    x0 = std::isfinite(x0) ? x0 - 1 : 0;
    x1 = x0 + 2;
  }
  if (!(y0 < y1)) {
    y0 = std::isfinite(y0) ? y0 - 1 : 0;
    y1 = y0 + 2;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    num(kWidth) + "\" height=\"" + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(title) + "</text>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + ph + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + label(xv) +
           "</text>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + label(yv) +
           "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + escape(x_label) +
         "</text>\n";
  svg += "<text transform=\"translate(16," + num(kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" +
         escape(y_label) + "</text>\n";
  double legend_y = kTop + 14;
  for (const PlotSeries& s : series) {
    std::string points;
    const std::size_t m = std::min(x.size(), s.values.size());
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(s.values[i])) continue;
      points += num(px(x[i])) + "," + num(py(s.values[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + num(kLeft + 8) + "\" y=\"" + num(legend_y) +
           "\" font-size=\"12\" fill=\"" + s.color + "\">" + escape(s.name) +
           "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace seqreg
