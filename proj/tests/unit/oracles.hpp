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

// Brute-force reference computations shared by the unit tests. They walk
// every path or history explicitly and share no code with the library's
// dynamic programs.

#ifndef SEQREG_TESTS_ORACLES_HPP_
#define SEQREG_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "seqreg/comparators.hpp"
#include "seqreg/losses.hpp"
#include "seqreg/minimax.hpp"
#include "seqreg/trees.hpp"

// Level-by-level tree labels, for brace-initialized test trees.
template <class T>
using Levels = std::vector<std::vector<T>>;

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Signs of path `bits` (most significant first, bit 1 means +1).
inline std::vector<int> signs(std::uint64_t bits, int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    s[static_cast<std::size_t>(t)] = ((bits >> (n - 1 - t)) & 1) ? 1 : -1;
  }
  return s;
}

// Node index at level t (1-based) reached by the first t - 1 signs.
inline std::size_t node_of(const std::vector<int>& s, int t) {
  std::size_t i = 0;
  for (int j = 0; j < t - 1; ++j) i = 2 * i + (s[static_cast<std::size_t>(j)] > 0);
  return i;
}

template <class Label>
Label label(const seqreg::LabeledTree<Label>& tree, const std::vector<int>& s,
            int t) {
  return tree.levels()[static_cast<std::size_t>(t - 1)][node_of(s, t)];
}

// E max_f sum_t [2C eps_t (f - mu_t) - offset(f - mu_t)] over all paths.
inline double offset_rademacher(const seqreg::ComparatorFamily& F,
                                const seqreg::CovariateTree& x,
                                const seqreg::RealTree& mu, double C,
                                const std::function<double(double)>& offset) {
  const int n = x.depth();
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const auto s = signs(bits, n);
    double best = -kInf;
    for (std::size_t f = 0; f < F.size(); ++f) {
      double sum = 0.0;
      for (int t = 1; t <= n; ++t) {
        const double d = F.value(f, label(x, s, t)) - label(mu, s, t);
        sum += 2 * C * s[static_cast<std::size_t>(t - 1)] * d - offset(d);
      }
      best = std::max(best, sum);
    }
    total += best;
  }
  return total / static_cast<double>(std::uint64_t{1} << n);
}

inline double seq_rademacher(const seqreg::ComparatorFamily& F,
                             const seqreg::CovariateTree& x) {
  const auto mu = seqreg::RealTree::constant(x.depth(), 0.0);
  return offset_rademacher(F, x, mu, 0.5, [](double) { return 0.0; });
}

// Minimax regret by plain recursion over cumulative losses, no memo.
inline double minimax(const seqreg::GameSpec& g, int t,
                      std::vector<double> L) {
  if (t == g.horizon) return -*std::min_element(L.begin(), L.end());
  double best_x = -kInf;
  for (seqreg::CovariateId x : g.covariates) {
    double best_yhat = kInf;
    for (double yhat : g.prediction_grid) {
      double worst_y = -kInf;
      for (double y : g.outcome_grid) {
        std::vector<double> next = L;
        for (std::size_t f = 0; f < next.size(); ++f) {
          next[f] += seqreg::loss_value(g.model, g.family.value(f, x), y);
        }
        worst_y = std::max(worst_y, seqreg::loss_value(g.model, yhat, y) +
                                        minimax(g, t + 1, std::move(next)));
      }
      best_yhat = std::min(best_yhat, worst_y);
    }
    best_x = std::max(best_x, best_yhat);
  }
  return best_x;
}

inline double minimax(const seqreg::GameSpec& g) {
  return minimax(g, 0, std::vector<double>(g.family.size(), 0.0));
}

}  // namespace oracle

#endif  // SEQREG_TESTS_ORACLES_HPP_
