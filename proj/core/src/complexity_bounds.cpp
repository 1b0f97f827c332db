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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "seqreg/complexity.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

constexpr double kLogLambdaLo = -30.0;
constexpr double kLogLambdaHi = 30.0;

}  // namespace

double finite_class_offset_bound_log(double log_size, int n, double C,
                                     const ScalarFn& gamma_star) {
  if (!(log_size >= 0)) {
    throw DomainError("finite_class_offset_bound: |W| must be >= 1");
  }
  if (!(C > 0)) throw DomainError("finite_class_offset_bound: C must be > 0");
  if (n < 0) throw DomainError("finite_class_offset_bound: n must be >= 0");
  if (n == 0) return 0.0;  // log|W| / lambda vanishes as lambda grows
  const double nn = static_cast<double>(n);
  auto objective = [&](double lambda) {
    const double g = gamma_star(2.0 * C * C * lambda);
    if (!(g < kInfinity)) return kInfinity;
    return log_size / lambda + nn * g;
  };
  auto feasible = [&](double u) { return objective(std::exp(u)) < kInfinity; };

  // gamma_star is nondecreasing, so the feasible set is an initial segment
  // of the log-lambda axis.
  if (!feasible(kLogLambdaLo)) return kInfinity;
  double hi_feasible = kLogLambdaHi;
  if (!feasible(kLogLambdaHi)) {
    double lo = kLogLambdaLo, hi = kLogLambdaHi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo));
         ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
    hi_feasible = lo;
  }
  if (hi_feasible <= kLogLambdaLo) return objective(std::exp(kLogLambdaLo));
  const Minimum m = minimize_log_axis(objective, kLogLambdaLo, hi_feasible);
  return std::min(m.value, objective(std::exp(hi_feasible)));
}

double finite_class_offset_bound(std::uint64_t size_W, int n, double C,
                                 const ScalarFn& gamma_star) {
  if (size_W < 1) {
    throw DomainError("finite_class_offset_bound: |W| must be >= 1");
  }
  return finite_class_offset_bound_log(std::log(static_cast<double>(size_W)),
                                       n, C, gamma_star);
}

double finite_class_linear_bound(std::span<const RealTree> W, double G) {
  if (W.empty()) throw DomainError("finite_class_linear_bound: W is empty");
  const int n = W.front().depth();
  double max_energy = 0.0;
  for (const RealTree& w : W) {
    if (w.depth() != n) {
      throw ShapeError("finite_class_linear_bound: trees differ in depth");
    }
    if (n == 0) continue;
    // Largest sum of squares along any path, leaves upward.
    std::vector<double> below(std::size_t{1} << (n - 1), 0.0);
    for (int t = n; t >= 1; --t) {
      const auto& level = w.level(t);
      std::vector<double> here(level.size());
      for (std::size_t i = 0; i < level.size(); ++i) {
        const double child =
            t == n ? 0.0 : std::max(below[2 * i], below[2 * i + 1]);
        here[i] = level[i] * level[i] + child;
      }
      below = std::move(here);
    }
    max_energy = std::max(max_energy, below[0]);
  }
  return G * std::sqrt(2.0 * std::log(static_cast<double>(W.size())) *
                       max_energy);
}

double dudley_bound(const ScalarFn& log_cover, int n, double rho,
                    double gamma) {
  if (!(rho > 0)) throw DomainError("dudley_bound: rho must be > 0");
  if (!(gamma >= rho)) throw DomainError("dudley_bound: need rho <= gamma");
  if (n < 0) throw DomainError("dudley_bound: n must be >= 0");
  const double nn = static_cast<double>(n);
  if (gamma == rho || n == 0) return 4.0 * rho * nn;
  const double integral = adaptive_simpson(
      [&](double d) { return std::sqrt(std::max(0.0, log_cover(d))); }, rho,
      gamma);
  return 4.0 * rho * nn + 12.0 * std::sqrt(nn) * integral;
}

Minimum dudley_bound_optimized(const ScalarFn& log_cover, int n,
                               double gamma) {
  if (!(gamma > 0)) throw DomainError("dudley_bound: gamma must be > 0");
  const double lg = std::log(gamma);
  return minimize_log_axis(
      [&](double rho) {
        return dudley_bound(log_cover, n, std::min(rho, gamma), gamma);
      },
      lg - 30.0, lg, 61);
}

EntropyProfile::EntropyProfile(std::vector<double> scales,
                               std::vector<double> log_sizes)
    : scales_(std::move(scales)), log_sizes_(std::move(log_sizes)) {
  if (scales_.empty() || scales_.size() != log_sizes_.size() ||
      scales_.front() != 0.0) {
    throw ShapeError("entropy profile: need matching scales starting at 0");
  }
  for (std::size_t i = 1; i < scales_.size(); ++i) {
    if (!(scales_[i] > scales_[i - 1])) {
      throw DomainError("entropy profile: scales must increase");
    }
  }
}

double EntropyProfile::operator()(double delta) const {
  if (!(delta >= 0)) throw DomainError("entropy profile: negative scale");
  const auto it = std::upper_bound(scales_.begin(), scales_.end(), delta);
  return log_sizes_[static_cast<std::size_t>(it - scales_.begin()) - 1];
}

double EntropyProfile::integral_sqrt(double a, double b) const {
  if (!(0 <= a && a <= b)) throw DomainError("entropy profile: bad interval");
  double total = 0.0;
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    const double lo = std::max(a, scales_[i]);
    const double hi =
        std::min(b, i + 1 < scales_.size() ? scales_[i + 1] : kInfinity);
    if (hi > lo) total += (hi - lo) * std::sqrt(std::max(0.0, log_sizes_[i]));
  }
  return total;
}

Minimum EntropyProfile::dudley_minimum(int n, double gamma) const {
  if (!(gamma > 0)) throw DomainError("dudley_bound: gamma must be > 0");
  const double nn = static_cast<double>(n);
  auto value = [&](double rho) {
    return 4.0 * rho * nn + 12.0 * std::sqrt(nn) * integral_sqrt(rho, gamma);
  };
  // rho -> 0+ limit.
  Minimum best{0.0, value(0.0)};
  for (double s : scales_) {
    if (s > 0 && s <= gamma) {
      const double v = value(s);
      if (v < best.value) best = {s, v};
    }
  }
  const double v = value(gamma);
  if (v < best.value) best = {gamma, v};
  return best;
}

double chained_offset_bound(const ScalarFn& log_cover_linf, int n, double C,
                            const ScalarFn& gamma_star) {
  if (n < 0) throw DomainError("chained_offset_bound: n must be >= 0");
  if (!(C > 0)) throw DomainError("chained_offset_bound: C must be > 0");
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  auto sqrt_entropy = [&](double d) {
    return std::sqrt(std::max(0.0, log_cover_linf(d)));
  };
  auto at_gamma = [&](double gamma) {
    const double lg = std::log(gamma);
    const Minimum chain = minimize_log_axis(
        [&](double rho) {
          rho = std::min(rho, gamma);
          return 4.0 * rho * nn +
                 12.0 * std::sqrt(nn) *
                     adaptive_simpson(sqrt_entropy, rho, gamma, 1e-9);
        },
        lg - 30.0, lg, 41, 1e-7);
    const double finite = finite_class_offset_bound_log(
        std::max(0.0, log_cover_linf(0.5 * gamma)), n, C, gamma_star);
    return C * chain.value + finite;
  };
  return minimize_log_axis(at_gamma, -25.0, 8.0, 67, 1e-7).value;
}

}  // namespace seqreg
