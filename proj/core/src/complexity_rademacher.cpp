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
#include "seqreg/rng.hpp"

namespace seqreg {
namespace {

void require_finite(const ComparatorFamily& family, const char* op) {
  if (!family.is_finite()) {
    throw CapabilityError(std::string(op) +
                          ": requires a finite-table family");
  }
}

void require_tree_covariates(const ComparatorFamily& family,
                             const CovariateTree& x) {
  for (const auto& level : x.levels()) {
    for (CovariateId id : level) {
      if (id >= family.num_covariates()) {
        throw LookupError("covariate tree: label " + std::to_string(id) +
                          " outside the family's covariate set");
      }
    }
  }
}

// Depth-first sweep over all 2^n paths. node_terms(t, node, out_a, out_b)
// fills per-predictor terms so that the increment for sign e is
// e * a[f] - b[f]. Every node is visited once; the result is the average of
// max_f (initial[f] + sum of increments) over leaves.
template <class NodeTerms>
double sweep_paths(int n, std::size_t nf, std::span<const double> initial,
                   NodeTerms&& node_terms) {
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(n) + 1,
                                        std::vector<double>(nf, 0.0));
  if (!initial.empty()) sums[0].assign(initial.begin(), initial.end());
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(nf));
  std::vector<std::vector<double>> b = a;
  double total = 0.0;

  auto visit = [&](auto&& self, int t, std::uint64_t node) -> void {
    const auto ti = static_cast<std::size_t>(t);
    if (t > n) {
      total += *std::max_element(sums[ti - 1].begin(), sums[ti - 1].end());
      return;
    }
    node_terms(t, node, a[ti], b[ti]);
    for (int e : {-1, 1}) {
      for (std::size_t f = 0; f < nf; ++f) {
        sums[ti][f] = sums[ti - 1][f] + e * a[ti][f] - b[ti][f];
      }
      self(self, t + 1, 2 * node + (e > 0 ? 1 : 0));
    }
  };
  if (n == 0) {
    return *std::max_element(sums[0].begin(), sums[0].end());
  }
  visit(visit, 1, 0);
  return total / std::ldexp(1.0, n);
}

}  // namespace

double seq_rademacher(const ComparatorFamily& family, const CovariateTree& x) {
  require_finite(family, "seq_rademacher");
  require_tree_covariates(family, x);
  const int n = x.depth();
  if (n > kExactPathDepth) {
    throw ResourceError("seq_rademacher: depth " + std::to_string(n) +
                        " exceeds the exact enumeration guard of " +
                        std::to_string(kExactPathDepth));
  }
  if (n == 0) return 0.0;
  const std::size_t nf = family.size();
  return sweep_paths(n, nf, {}, [&](int t, std::uint64_t node,
                                    std::vector<double>& a,
                                    std::vector<double>& b) {
    const CovariateId xi = x.level(t)[node];
    for (std::size_t f = 0; f < nf; ++f) {
      a[f] = family.value(f, xi);
      b[f] = 0.0;
    }
  });
}

double offset_rademacher(const ComparatorFamily& family,
                         const CovariateTree& x, const RealTree& mu, double C,
                         const ScalarFn& offset) {
  require_finite(family, "offset_rademacher");
  if (x.depth() != mu.depth()) {
    throw ShapeError("offset_rademacher: covariate tree depth " +
                     std::to_string(x.depth()) + " differs from mean tree "
                     "depth " + std::to_string(mu.depth()));
  }
  require_tree_covariates(family, x);
  const int n = x.depth();
  if (n > kExactPathDepth) {
    throw ResourceError("offset_rademacher: depth " + std::to_string(n) +
                        " exceeds the exact enumeration guard; use "
                        "offset_rademacher_estimate");
  }
  if (n == 0) return 0.0;
  const std::size_t nf = family.size();
  return sweep_paths(n, nf, {}, [&](int t, std::uint64_t node,
                                    std::vector<double>& a,
                                    std::vector<double>& b) {
    const CovariateId xi = x.level(t)[node];
    const double m = mu.level(t)[node];
    for (std::size_t f = 0; f < nf; ++f) {
      const double dev = family.value(f, xi) - m;
      a[f] = 2.0 * C * dev;
      b[f] = offset(dev);
    }
  });
}

Expectation offset_rademacher_estimate(const ComparatorFamily& family,
                                       const CovariateTree& x,
                                       const RealTree& mu, double C,
                                       const ScalarFn& offset,
                                       std::uint64_t samples,
                                       std::uint64_t seed) {
  if (x.depth() <= kExactPathDepth) {
    Expectation e;
    e.value = offset_rademacher(family, x, mu, C, offset);
    e.samples = std::uint64_t{1} << x.depth();
    return e;
  }
  require_finite(family, "offset_rademacher_estimate");
  if (x.depth() != mu.depth()) {
    throw ShapeError("offset_rademacher_estimate: depth mismatch");
  }
  require_tree_covariates(family, x);
  if (samples < 2) throw DomainError("offset_rademacher_estimate: samples < 2");
  const int n = x.depth();
  const std::size_t nf = family.size();
  PortableRng rng(seed);
  std::vector<double> sums(nf);
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::uint64_t node = 0;
    for (int t = 1; t <= n; ++t) {
      const int e = rng.sign();
      const CovariateId xi = x.level(t)[node];
      const double m = mu.level(t)[node];
      for (std::size_t f = 0; f < nf; ++f) {
        const double dev = family.value(f, xi) - m;
        sums[f] += 2.0 * C * e * dev - offset(dev);
      }
      node = 2 * node + (e > 0 ? 1 : 0);
    }
    // Welford update.
    const double v = *std::max_element(sums.begin(), sums.end());
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  Expectation e;
  e.value = mean;
  e.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) /
                          static_cast<double>(samples));
  e.exact = false;
  e.samples = samples;
  e.seed = seed;
  return e;
}

double offset_rademacher_sup_work(std::size_t family_size,
                                  std::size_t num_covariates,
                                  std::size_t mu_grid_size, int n) {
  return std::pow(2.0 * static_cast<double>(num_covariates) *
                      static_cast<double>(mu_grid_size),
                  n) *
         static_cast<double>(family_size);
}

double offset_rademacher_sup(const ComparatorFamily& family,
                             std::span<const CovariateId> covariates,
                             std::span<const double> mu_grid, int n, double C,
                             const ScalarFn& offset,
                             std::span<const double> initial) {
  require_finite(family, "offset_rademacher_sup");
  if (n < 0) throw DomainError("offset_rademacher_sup: negative depth");
  const std::size_t nf = family.size();
  if (!initial.empty() && initial.size() != nf) {
    throw ShapeError("offset_rademacher_sup: initial offsets must have one "
                     "entry per predictor");
  }
  if (n == 0) {
    return initial.empty()
               ? 0.0
               : *std::max_element(initial.begin(), initial.end());
  }
  if (covariates.empty() || mu_grid.empty()) {
    throw DomainError("offset_rademacher_sup: grids must be nonempty");
  }
  for (CovariateId id : covariates) {
    if (id >= family.num_covariates()) {
      throw LookupError("offset_rademacher_sup: unknown covariate " +
                        std::to_string(id));
    }
  }
  const double work =
      offset_rademacher_sup_work(nf, covariates.size(), mu_grid.size(), n);
  if (work > kSupSearchGuard) {
    throw ResourceError("offset_rademacher_sup: search size " +
                        std::to_string(work) + " exceeds the guard " +
                        std::to_string(kSupSearchGuard));
  }

  // Per (x, mu) choice: increment = e * a[f] - b[f].
  const std::size_t nchoice = covariates.size() * mu_grid.size();
  std::vector<double> a(nchoice * nf), b(nchoice * nf);
  for (std::size_t i = 0; i < covariates.size(); ++i) {
    for (std::size_t j = 0; j < mu_grid.size(); ++j) {
      const std::size_t c = i * mu_grid.size() + j;
      for (std::size_t f = 0; f < nf; ++f) {
        const double dev = family.value(f, covariates[i]) - mu_grid[j];
        a[c * nf + f] = 2.0 * C * dev;
        b[c * nf + f] = offset(dev);
      }
    }
  }

  std::vector<std::vector<double>> sums(static_cast<std::size_t>(n) + 1,
                                        std::vector<double>(nf, 0.0));
  if (!initial.empty()) sums[0].assign(initial.begin(), initial.end());

  // W(t, S) = max over choices of the average of W(t + 1, S +- increment).
  auto value = [&](auto&& self, int t) -> double {
    const auto ti = static_cast<std::size_t>(t);
    const std::vector<double>& s = sums[ti];
    if (t == n) return *std::max_element(s.begin(), s.end());
    std::vector<double>& next = sums[ti + 1];
    double best = -kInfinity;
    for (std::size_t c = 0; c < nchoice; ++c) {
      double avg = 0.0;
      for (int e : {-1, 1}) {
        for (std::size_t f = 0; f < nf; ++f) {
          next[f] = s[f] + e * a[c * nf + f] - b[c * nf + f];
        }
        avg += self(self, t + 1);
      }
      best = std::max(best, 0.5 * avg);
    }
    return best;
  };
  return value(value, 0);
}

}  // namespace seqreg
