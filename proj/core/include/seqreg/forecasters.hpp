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

#ifndef SEQREG_FORECASTERS_HPP_
#define SEQREG_FORECASTERS_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "seqreg/comparators.hpp"
#include "seqreg/complexity.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/losses.hpp"

namespace seqreg {

// Potential on observed data. evaluate must be pure.
using RelaxationFn = std::function<double(std::span<const Observation>)>;

struct RelaxationOracle {
  std::string name;
  int horizon = 0;
  RelaxationFn evaluate;
  // inf_f of the cumulative comparator loss on a full history; empty when
  // the family is empty, in which case the initial condition is vacuous.
  RelaxationFn comparator_loss;
  std::map<std::string, double> parameters;
  // Evaluation cost is exponential in the remaining horizon.
  bool toy_scale = false;
};

// temperature * log sum_f exp(-L_f / temperature), where L_f is the
// cumulative square loss of f. A nonpositive temperature selects B^2.
double experts_relaxation(const ComparatorFamily& family, double B,
                          std::span<const Observation> history,
                          double temperature = 0.0);

// Clip of (Rel(.., +B) - Rel(.., -B)) / (4B) for the experts relaxation,
// computed from the log-sum-exp of the two continuations.
double experts_forecast(const ComparatorFamily& family, double B,
                        std::span<const Observation> history,
                        const Covariate& x, double temperature = 0.0);

// Clip(x^T (sum_{j<=t} x_j x_j^T + lambda I)^{-1} sum_{j<t} y_j x_j); the
// Gram matrix includes the current covariate.
double vaw_forecast(std::span<const Observation> history,
                    const Eigen::VectorXd& x, double lambda, double B);

// |b|^2_{A^{-1}} + 4 B^2 log((n/d)^d / det A) - sum y^2 with
// A = sum z z^T + lambda I and b = sum y z.
double vaw_relaxation(std::span<const Observation> history, double lambda,
                      double B, int n, int d);

RelaxationOracle experts_oracle(const ComparatorFamily& family, double B,
                                int n, double temperature = 0.0);
RelaxationOracle vaw_oracle(int d, double lambda, double B, int n);

// sup over covariate and mean trees of E sup_f [sum_{j>t} 2G e_j (f - mu) -
// delta_lower(f - mu) - L_t(f)], restricted to the given covariate set and
// mean grid. Toy scale only.
RelaxationOracle conditional_rademacher_oracle(
    const ComparatorFamily& family, const LossModel& model,
    std::vector<CovariateId> covariates, std::vector<double> mu_grid, int n);

RelaxationOracle zero_oracle(int n);

using PredictionSet = std::variant<std::vector<double>, Interval>;
using StageLoss = std::function<double(double yhat, double y)>;

// argmin over the prediction set of max over the outcome grid of
// loss + Rel(history + (x, y)). Square loss with outcome grid {-B, B} and an
// interval prediction set covering [-B, B] takes the closed form
// Clip((Rel(+B) - Rel(-B)) / (4B)) unless force_generic is set. Interval
// sets are searched by golden section, grids exhaustively (ties to the
// smallest prediction).
double relaxation_forecast(const RelaxationOracle& rel, const LossModel& model,
                           std::span<const Observation> history,
                           const Covariate& x, const PredictionSet& predictions,
                           std::span<const double> outcome_grid,
                           bool force_generic = false);

struct AdmissibilityGrids {
  std::vector<Covariate> covariates;
  std::vector<double> outcome_grid;
  PredictionSet predictions = Interval{-1.0, 1.0};
  // Support of the two-point distributions in the distributional check.
  double B = 1.0;
  int mixing_points = 101;
};

struct MarginSite {
  std::size_t history = 0;  // index into the sampled histories
  int t = 0;                // round (1-based); n for the initial condition
  std::size_t covariate = 0;
};

struct AdmissibilityReport {
  // Worst recursive margin per round t = 1..n (index t - 1): positive when
  // Rel(prefix) exceeds inf_yhat max_y {loss + Rel(prefix + (x, y))}.
  std::vector<double> round_margins;
  // Worst distributional margin per round over two-point outcome laws.
  std::vector<double> recipe_margins;
  // Worst Rel(full) + inf_f L_f over full-length histories; +inf if none.
  double initial_margin = 0.0;
  double empty_value = 0.0;  // Rel on the empty history
  std::size_t prefixes_checked = 0;
  std::optional<MarginSite> worst_round_site;
  std::optional<MarginSite> worst_initial_site;

  double worst_round_margin() const;
  double worst_recipe_margin() const;
  bool admissible(double tolerance = 1e-8) const;
};

AdmissibilityReport check_admissibility(const RelaxationOracle& rel,
                                        const StageLoss& loss,
                                        const AdmissibilityGrids& grids,
                                        std::span<const History> histories);

AdmissibilityReport check_admissibility(const RelaxationOracle& rel,
                                        const LossModel& model,
                                        const AdmissibilityGrids& grids,
                                        std::span<const History> histories);

// All histories of the given length over the covariate set and outcome grid.
std::vector<History> enumerate_histories(std::span<const Covariate> covariates,
                                         std::span<const double> outcome_grid,
                                         int length);

class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string name() const = 0;
  virtual void reset() = 0;
  virtual double predict(const Covariate& x) = 0;
  virtual void observe(const Covariate& x, double y) = 0;
};

std::unique_ptr<Forecaster> make_experts_forecaster(ComparatorFamily family,
                                                    double B,
                                                    double temperature = 0.0);
// Keeps the Gram matrix and recomputes one Cholesky factor per prediction.
std::unique_ptr<Forecaster> make_vaw_forecaster(int d, double lambda, double B);
std::unique_ptr<Forecaster> make_relaxation_forecaster(
    RelaxationOracle rel, LossModel model, PredictionSet predictions,
    std::vector<double> outcome_grid);
// Plays a fixed member of the family.
std::unique_ptr<Forecaster> make_comparator_forecaster(ComparatorFamily family,
                                                       PredictorHandle handle);

struct RoundRecord {
  int t = 0;  // 1-based
  Covariate x;
  double yhat = 0.0;
  double y = 0.0;
  double loss = 0.0;
  double cumulative_regret = 0.0;
};

struct RunResult {
  std::vector<RoundRecord> records;
  double learner_loss = 0.0;
  double comparator_loss = 0.0;
  double final_regret = 0.0;
};

// Thrown when the forecaster fails mid-run; carries the rounds completed.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, std::vector<RoundRecord> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<RoundRecord>& partial() const { return partial_; }

 private:
  std::vector<RoundRecord> partial_;
};

// Plays the forecaster through the sequence. The comparator term is
// best_comparator_loss on each prefix (ridge applies to linear families).
RunResult run_online(Forecaster& forecaster,
                     std::span<const Observation> sequence,
                     const LossModel& model, const ComparatorFamily& family,
                     double ridge = 0.0);

enum class BoundKind { kExperts, kVaw };

struct BoundParams {
  double B = 1.0;
  std::size_t family_size = 1;  // experts
  int n = 0;                    // vaw
  int d = 1;                    // vaw
  double lambda = 1.0;          // vaw
};

// Experts: B^2 log |F|. VAW: 4 d B^2 log(n / (lambda d)), the norm term
// excluded; DomainError when n < lambda d.
double regret_bound(BoundKind kind, const BoundParams& params);

}  // namespace seqreg

#endif  // SEQREG_FORECASTERS_HPP_
