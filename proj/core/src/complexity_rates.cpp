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
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "seqreg/complexity.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

void check_rate_args(double p, double r, int n) {
  if (!(p > 0)) throw DomainError("rate: p must be > 0");
  if (!(r >= 2)) throw DomainError("rate: r must be >= 2");
  if (n < 2) throw DomainError("rate: n must be >= 2");
}

// n^(-r/a) S^(2r/a) K^(-(2-p)/a) with a = 2(r-1) + p.
double curvature_branch(double p, double r, double S, double K, double n) {
  const double a = 2.0 * (r - 1.0) + p;
  if (K == 0.0) return kInfinity;
  return std::pow(n, -r / a) * std::pow(S, 2.0 * r / a) *
         std::pow(K, -(2.0 - p) / a);
}

}  // namespace

double rate_upper(double p, double r, double G, double K, int n,
                  const RateConstants& k) {
  check_rate_args(p, r, n);
  if (!(G >= 0) || !(K >= 0)) throw DomainError("rate: need G, K >= 0");
  if (G == 0.0) return 0.0;
  const double nn = static_cast<double>(n);
  const double L = std::log(nn);
  if (p < 2.0) {
    const double curved = k.c * curvature_branch(p, r, G, K, nn) * L;
    const double parametric = k.c_family * G * std::sqrt(L) / std::sqrt(nn);
    return std::min(curved, parametric);
  }
  const double base = k.c * G * std::sqrt(L) * std::pow(nn, -1.0 / p);
  return p == 2.0 ? base * L : base;
}

double rate_lower(double p, double r, double R, double K, int n,
                  const RateConstants& k) {
  check_rate_args(p, r, n);
  if (!(R >= 0) || !(K >= 0)) throw DomainError("rate: need R, K >= 0");
  if (R == 0.0) return 0.0;
  const double nn = static_cast<double>(n);
  if (p > 2.0) return 0.5 * R * std::pow(nn, -1.0 / p);
  return k.c * std::min(curvature_branch(p, r, R, K, nn), R / std::sqrt(nn));
}

double rate_upper_exponent(double p, double r, double K) {
  if (!(p > 0)) throw DomainError("rate: p must be > 0");
  if (p >= 2.0) return -1.0 / p;
  // The smaller of the curvature and parametric branches wins for large n.
  const double parametric = -0.5;
  if (K == 0.0) return parametric;
  return std::min(-r / (2.0 * (r - 1.0) + p), parametric);
}

double rate_lower_exponent(double p, double r, double K) {
  if (!(p > 0)) throw DomainError("rate: p must be > 0");
  if (p > 2.0) return -1.0 / p;
  const double sqrt_branch = -0.5;
  if (K == 0.0) return sqrt_branch;
  const double curvature = -r / (2.0 * (r - 1.0) + p);
  return curvature < sqrt_branch ? curvature : sqrt_branch;
}

double rate_upper_log_power(double p, double K) {
  if (!(p > 0)) throw DomainError("rate: p must be > 0");
  if (p < 2.0) return K > 0 ? 1.0 : 0.5;
  return p == 2.0 ? 1.5 : 0.5;
}

double sparse_cover_bound(int M, int s, double beta) {
  if (s < 1 || s > M) throw DomainError("sparse_cover_bound: need 1 <= s <= M");
  if (!(beta > 0)) throw DomainError("sparse_cover_bound: beta must be > 0");
  const double ss = s;
  return ss * std::log(std::exp(1.0) * M / ss) + ss * std::log(1.0 / beta);
}

double sparse_rate(int M, int s, int n) {
  if (s < 1 || s > M) throw DomainError("sparse_rate: need 1 <= s <= M");
  if (n < 1) throw DomainError("sparse_rate: n must be >= 1");
  return s * std::log(static_cast<double>(M) / s) / n;
}

KhinchineResult khinchine_check(int k) {
  if (k < 1) throw DomainError("khinchine_check: k must be >= 1");
  if (k > kKhinchineGuard) {
    throw ResourceError("khinchine_check: 2^" + std::to_string(k) +
                        " sign vectors exceed the guard of 2^" +
                        std::to_string(kKhinchineGuard));
  }
  // Sum over all sign vectors of |2 * (#plus) - k|, accumulated exactly.
  std::uint64_t total = 0;
  const std::uint64_t count = std::uint64_t{1} << k;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    const int plus = std::popcount(bits);
    const int s = 2 * plus - k;
    total += static_cast<std::uint64_t>(s < 0 ? -s : s);
  }
  KhinchineResult r;
  r.mean_abs_sum = static_cast<double>(total) / static_cast<double>(count);
  r.holds = r.mean_abs_sum >= std::sqrt(0.5 * k);
  return r;
}

}  // namespace seqreg
