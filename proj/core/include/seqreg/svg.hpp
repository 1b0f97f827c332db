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

#ifndef SEQREG_SVG_HPP_
#define SEQREG_SVG_HPP_

#include <span>
#include <string>
#include <vector>

namespace seqreg {

struct PlotSeries {
  std::string name;
  std::vector<double> values;  // one per x coordinate
  std::string color = "#1f77b4";
};

// Self-contained SVG line chart. Non-finite values are skipped.
std::string svg_line_plot(std::span<const double> x,
                          std::span<const PlotSeries> series,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label);

}  // namespace seqreg

#endif  // SEQREG_SVG_HPP_
