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

#include "seqreg/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqreg/errors.hpp"

namespace seqreg {

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -kInfinity;
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

Minimum golden_section(const std::function<double(double)>& f, double lo,
                       double hi, double rel_tol) {
  if (!(lo <= hi)) throw DomainError("golden_section: empty bracket");
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500; ++it) {
    if (b - a <= rel_tol * std::max(1.0, std::abs(0.5 * (a + b)))) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  Minimum best{c, fc};
  if (fd < best.value) best = {d, fd};
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx < best.value) best = {x, fx};
  }
  return best;
}

Minimum minimize_log_axis(const std::function<double(double)>& f,
                          double log_lo, double log_hi, int scan_points,
                          double rel_tol) {
  if (scan_points < 3) scan_points = 3;
  auto g = [&](double u) { return f(std::exp(u)); };
  const double step = (log_hi - log_lo) / (scan_points - 1);
  int best = -1;
  double best_val = kInfinity;
  for (int i = 0; i < scan_points; ++i) {
    const double v = g(log_lo + step * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best < 0) return {std::exp(0.5 * (log_lo + log_hi)), kInfinity};
  const double lo = log_lo + step * std::max(0, best - 1);
  const double hi = log_lo + step * std::min(scan_points - 1, best + 1);
  Minimum m = golden_section(g, lo, hi, rel_tol);
  if (!(m.value <= best_val)) m = {log_lo + step * best, best_val};
  m.argmin = std::exp(m.argmin);
  return m;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a,
                    double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Seed the absolute tolerance from a coarse estimate of the magnitude.
  double scale = std::abs(whole);
  const int probes = 16;
  double coarse = 0.0;
  for (int i = 0; i < probes; ++i) {
    coarse += std::abs(f(a + (b - a) * (i + 0.5) / probes));
  }
  scale = std::max(scale, std::abs(b - a) * coarse / probes);
  const double tol = std::max(rel_tol * scale, 1e-300);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace seqreg
