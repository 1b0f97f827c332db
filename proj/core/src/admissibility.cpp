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

#include "seqreg/forecasters.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

constexpr double kInnerTolerance = 1e-13;

bool same_covariate(const Covariate& a, const Covariate& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ia = std::get_if<CovariateId>(&a)) {
    return *ia == std::get<CovariateId>(b);
  }
  const auto& va = std::get<Eigen::VectorXd>(a);
  const auto& vb = std::get<Eigen::VectorXd>(b);
  return va.size() == vb.size() && va == vb;
}

std::size_t common_prefix(const History& a, const History& b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k].y == b[k].y &&
         same_covariate(a[k].x, b[k].x)) {
    ++k;
  }
  return k;
}

// inf over the prediction set of a convex function of yhat.
double minimize_over(const PredictionSet& set,
                     const std::function<double(double)>& f) {
  if (const auto* interval = std::get_if<Interval>(&set)) {
    return golden_section(f, interval->lo, interval->hi, kInnerTolerance).value;
  }
  const auto& grid = std::get<std::vector<double>>(set);
  if (grid.empty()) throw DomainError("admissibility: empty prediction grid");
  double best = kInfinity;
  for (double p : grid) best = std::min(best, f(p));
  return best;
}

}  // namespace

double AdmissibilityReport::worst_round_margin() const {
  double w = kInfinity;
  for (double m : round_margins) w = std::min(w, m);
  return w;
}

double AdmissibilityReport::worst_recipe_margin() const {
  double w = kInfinity;
  for (double m : recipe_margins) w = std::min(w, m);
  return w;
}

bool AdmissibilityReport::admissible(double tolerance) const {
  return worst_round_margin() >= -tolerance &&
         worst_recipe_margin() >= -tolerance && initial_margin >= -tolerance;
}

AdmissibilityReport check_admissibility(const RelaxationOracle& rel,
                                        const StageLoss& loss,
                                        const AdmissibilityGrids& grids,
                                        std::span<const History> histories) {
  const int n = rel.horizon;
  if (grids.covariates.empty() || grids.outcome_grid.empty()) {
    throw DomainError("admissibility: covariate set and outcome grid must be "
                      "nonempty");
  }
  if (grids.mixing_points < 2) {
    throw DomainError("admissibility: at least two mixing weights required");
  }
  AdmissibilityReport report;
  report.round_margins.assign(static_cast<std::size_t>(std::max(n, 0)),
                              kInfinity);
  report.recipe_margins = report.round_margins;
  report.initial_margin = kInfinity;
  report.empty_value = rel.evaluate(History{});

  const double B = grids.B;
  std::vector<double> weights(static_cast<std::size_t>(grids.mixing_points));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = static_cast<double>(i) / (weights.size() - 1);
  }

  double worst_round = kInfinity;
  History next;
  for (std::size_t h = 0; h < histories.size(); ++h) {
    const History& hist = histories[h];
    // Prefixes shared with the previous history were already checked.
    const std::size_t first =
        h == 0 ? 0 : common_prefix(histories[h - 1], hist) + 1;
    const std::size_t last =
        std::min(hist.size(), static_cast<std::size_t>(std::max(n, 1) - 1));
    for (std::size_t k = first; n > 0 && k <= last; ++k) {
      std::span<const Observation> prefix(hist.data(), k);
      const double before = rel.evaluate(prefix);
      next.assign(prefix.begin(), prefix.end());
      next.push_back({});
      for (std::size_t xi = 0; xi < grids.covariates.size(); ++xi) {
        next.back().x = grids.covariates[xi];
        std::vector<double> cont(grids.outcome_grid.size());
        for (std::size_t yi = 0; yi < cont.size(); ++yi) {
          next.back().y = grids.outcome_grid[yi];
          cont[yi] = rel.evaluate(next);
        }
        const double inner = minimize_over(grids.predictions, [&](double p) {
          double worst = -kInfinity;
          for (std::size_t yi = 0; yi < cont.size(); ++yi) {
            worst = std::max(worst, loss(p, grids.outcome_grid[yi]) + cont[yi]);
          }
          return worst;
        });
        const double margin = before - inner;
        report.round_margins[k] = std::min(report.round_margins[k], margin);
        if (margin < worst_round) {
          worst_round = margin;
          report.worst_round_site = MarginSite{h, static_cast<int>(k) + 1, xi};
        }

        next.back().y = B;
        const double up = rel.evaluate(next);
        next.back().y = -B;
        const double down = rel.evaluate(next);
        double recipe = -kInfinity;
        for (double w : weights) {
          const double expected_loss =
              minimize_over(grids.predictions, [&](double p) {
                return w * loss(p, B) + (1.0 - w) * loss(p, -B);
              });
          recipe = std::max(recipe, expected_loss + w * up + (1.0 - w) * down);
        }
        report.recipe_margins[k] = std::min(report.recipe_margins[k],
                                            before - recipe);
      }
      ++report.prefixes_checked;
    }
    if (static_cast<int>(hist.size()) == n && rel.comparator_loss) {
      const double margin = rel.evaluate(hist) + rel.comparator_loss(hist);
      if (margin < report.initial_margin) {
        report.initial_margin = margin;
        report.worst_initial_site = MarginSite{h, n, 0};
      }
    }
  }
  return report;
}

AdmissibilityReport check_admissibility(const RelaxationOracle& rel,
                                        const LossModel& model,
                                        const AdmissibilityGrids& grids,
                                        std::span<const History> histories) {
  const StageLoss loss = [&model](double yhat, double y) {
    return model.value_unchecked(yhat, y);
  };
  return check_admissibility(rel, loss, grids, histories);
}

std::vector<History> enumerate_histories(std::span<const Covariate> covariates,
                                         std::span<const double> outcome_grid,
                                         int length) {
  if (length < 0) throw DomainError("enumerate_histories: negative length");
  const std::size_t branch = covariates.size() * outcome_grid.size();
  if (branch == 0) return length == 0 ? std::vector<History>{History{}}
                                      : std::vector<History>{};
  double total = std::pow(static_cast<double>(branch), length);
  if (total > 1e7) {
    throw ResourceError("enumerate_histories: " + std::to_string(total) +
                        " histories exceed the guard 1e7");
  }
  std::vector<History> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> digits(static_cast<std::size_t>(length), 0);
  while (true) {
    History h;
    h.reserve(digits.size());
    for (std::size_t d : digits) {
      h.push_back({covariates[d / outcome_grid.size()],
                   outcome_grid[d % outcome_grid.size()]});
    }
    out.push_back(std::move(h));
    int pos = length - 1;
    while (pos >= 0 && ++digits[pos] == branch) digits[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

}  // namespace seqreg
