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

#ifndef SEQREG_NUMERIC_HPP_
#define SEQREG_NUMERIC_HPP_

#include <functional>
#include <limits>
#include <span>

namespace seqreg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Relative tolerance shared by every scalar search.
inline constexpr double kSearchTolerance = 1e-8;

struct Minimum {
  double argmin = 0.0;
  double value = kInfinity;
};

// log(sum(exp(v))) with max shifting; -inf for an empty span.
double log_sum_exp(std::span<const double> v);

// Golden-section search for a unimodal f on [lo, hi]. Stops when the bracket
// is narrower than rel_tol * max(1, |x|).
Minimum golden_section(const std::function<double(double)>& f, double lo,
                       double hi, double rel_tol = kSearchTolerance);

// Minimizes f(exp(u)) over u in [log_lo, log_hi]: a uniform scan over
// scan_points locates the best bracket, which golden-section then refines.
// +inf values are never selected while a finite value exists. The returned
// argmin is on the original (not log) axis.
Minimum minimize_log_axis(const std::function<double(double)>& f,
                          double log_lo, double log_hi, int scan_points = 121,
                          double rel_tol = kSearchTolerance);

// Adaptive Simpson quadrature of f over [a, b] to the given relative
// tolerance. Returns 0 for a == b.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = kSearchTolerance,
                        int max_depth = 50);

inline double clip(double z, double bound) {
  return z < -bound ? -bound : (z > bound ? bound : z);
}

}  // namespace seqreg

#endif  // SEQREG_NUMERIC_HPP_
