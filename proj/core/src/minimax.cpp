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

#include "seqreg/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

constexpr double kQuantum = 1e-12;
constexpr double kTieSlack = 1e-12;
constexpr double kGridMatch = 1e-12;

}  // namespace

void validate_game(const GameSpec& g) {
  if (!g.family.is_finite()) {
    throw CapabilityError("game: the family must be a finite table");
  }
  if (g.horizon < 0) throw DomainError("game: negative horizon");
  if (g.covariates.empty() || g.outcome_grid.empty() ||
      g.prediction_grid.empty()) {
    throw DomainError("game: covariate set and grids must be nonempty");
  }
  for (CovariateId x : g.covariates) {
    if (x >= g.family.num_covariates()) {
      throw LookupError("game: covariate " + std::to_string(x) +
                        " not in the family's covariate set");
    }
  }
  for (double y : g.outcome_grid) {
    if (!g.model.outcome_range().contains(y)) {
      throw DomainError("game: outcome grid leaves the outcome range");
    }
  }
  for (double p : g.prediction_grid) {
    if (!g.model.prediction_range().contains(p)) {
      throw DomainError("game: prediction grid leaves the prediction range");
    }
  }
  for (std::size_t f = 0; f < g.family.size(); ++f) {
    for (CovariateId x : g.covariates) {
      if (!g.model.prediction_range().contains(g.family.value(f, x))) {
        throw DomainError("game: family values leave the prediction range");
      }
    }
  }
}

double game_state_estimate(const GameSpec& g) {
  const double branch = static_cast<double>(g.covariates.size()) *
                        static_cast<double>(g.outcome_grid.size());
  double states = 0.0, level = 1.0;
  for (int t = 0; t <= g.horizon; ++t) {
    states += level;
    level *= branch;
  }
  return states * static_cast<double>(g.family.size());
}

double learner_grid_tolerance(const GameSpec& g) {
  std::vector<double> grid = g.prediction_grid;
  std::sort(grid.begin(), grid.end());
  const Interval& r = g.model.prediction_range();
  double h = 2.0 * std::max(grid.front() - r.lo, r.hi - grid.back());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    h = std::max(h, grid[i] - grid[i - 1]);
  }
  return g.horizon * g.model.grad_bound() * h / 2.0;
}

std::size_t MinimaxSolver::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<int>()(k.t);
  for (std::int64_t v : k.q) {
    h ^= std::hash<std::int64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
  }
  return h;
}

MinimaxSolver::MinimaxSolver(GameSpec game) : game_(std::move(game)) {
  validate_game(game_);
  const double est = game_state_estimate(game_);
  if (est > kGameStateGuard) {
    throw ResourceError("minimax: estimated " + std::to_string(est) +
                        " state entries exceed the guard " +
                        std::to_string(kGameStateGuard));
  }
  const std::size_t nf = game_.family.size();
  comparator_loss_.resize(game_.covariates.size());
  for (std::size_t xi = 0; xi < game_.covariates.size(); ++xi) {
    for (double y : game_.outcome_grid) {
      std::vector<double> l(nf);
      for (std::size_t f = 0; f < nf; ++f) {
        l[f] = game_.model.value_unchecked(
            game_.family.value(f, game_.covariates[xi]), y);
      }
      comparator_loss_[xi].push_back(std::move(l));
    }
  }
}

std::size_t MinimaxSolver::covariate_index(CovariateId x) const {
  for (std::size_t i = 0; i < game_.covariates.size(); ++i) {
    if (game_.covariates[i] == x) return i;
  }
  throw ProtocolError("minimax: covariate " + std::to_string(x) +
                      " is not in the game");
}

std::vector<double> MinimaxSolver::state_after(
    std::span<const PlayedRound> prefix) const {
  if (static_cast<int>(prefix.size()) > game_.horizon) {
    throw ProtocolError("minimax: prefix longer than the horizon");
  }
  std::vector<double> losses(game_.family.size(), 0.0);
  for (const PlayedRound& r : prefix) {
    const std::size_t xi = covariate_index(r.x);
    std::size_t yi = game_.outcome_grid.size();
    for (std::size_t j = 0; j < game_.outcome_grid.size(); ++j) {
      if (std::abs(game_.outcome_grid[j] - r.y) <= kGridMatch) {
        yi = j;
        break;
      }
    }
    if (yi == game_.outcome_grid.size()) {
      throw ProtocolError("minimax: outcome " + std::to_string(r.y) +
                          " is not on the outcome grid");
    }
    for (std::size_t f = 0; f < losses.size(); ++f) {
      losses[f] += comparator_loss_[xi][yi][f];
    }
  }
  return losses;
}

std::vector<double> MinimaxSolver::outcome_values(
    int t, const std::vector<double>& losses, std::size_t xi) {
  std::vector<double> out(game_.outcome_grid.size());
  std::vector<double> next(losses.size());
  for (std::size_t yi = 0; yi < out.size(); ++yi) {
    for (std::size_t f = 0; f < losses.size(); ++f) {
      next[f] = losses[f] + comparator_loss_[xi][yi][f];
    }
    out[yi] = solve(t + 1, next);
  }
  return out;
}

double MinimaxSolver::solve(int t, const std::vector<double>& losses) {
  if (t == game_.horizon) {
    return -*std::min_element(losses.begin(), losses.end());
  }
  Key key{t, {}};
  key.q.reserve(losses.size());
  for (double l : losses) {
    key.q.push_back(static_cast<std::int64_t>(std::llround(l / kQuantum)));
  }
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  double best = -kInfinity;
  for (std::size_t xi = 0; xi < game_.covariates.size(); ++xi) {
    const std::vector<double> cont = outcome_values(t, losses, xi);
    double inner = kInfinity;
    for (double p : game_.prediction_grid) {
      double worst = -kInfinity;
      for (std::size_t yi = 0; yi < cont.size(); ++yi) {
        worst = std::max(worst, game_.model.value_unchecked(
                                    p, game_.outcome_grid[yi]) + cont[yi]);
      }
      inner = std::min(inner, worst);
    }
    best = std::max(best, inner);
  }
  memo_.emplace(std::move(key), best);
  return best;
}

double MinimaxSolver::value() {
  return solve(0, std::vector<double>(game_.family.size(), 0.0));
}

double MinimaxSolver::continuation(std::span<const PlayedRound> prefix) {
  return solve(static_cast<int>(prefix.size()), state_after(prefix));
}

std::size_t MinimaxSolver::best_covariate_index(
    std::span<const PlayedRound> prefix) {
  const std::vector<double> losses = state_after(prefix);
  const int t = static_cast<int>(prefix.size());
  if (t >= game_.horizon) throw ProtocolError("minimax: game is over");
  std::size_t arg = 0;
  double best = -kInfinity;
  for (std::size_t xi = 0; xi < game_.covariates.size(); ++xi) {
    const std::vector<double> cont = outcome_values(t, losses, xi);
    double inner = kInfinity;
    for (double p : game_.prediction_grid) {
      double worst = -kInfinity;
      for (std::size_t yi = 0; yi < cont.size(); ++yi) {
        worst = std::max(worst, game_.model.value_unchecked(
                                    p, game_.outcome_grid[yi]) + cont[yi]);
      }
      inner = std::min(inner, worst);
    }
    if (inner > best + kTieSlack) {
      best = inner;
      arg = xi;
    }
  }
  return arg;
}

std::size_t MinimaxSolver::best_prediction_index(
    std::span<const PlayedRound> prefix, CovariateId x) {
  const std::vector<double> losses = state_after(prefix);
  const int t = static_cast<int>(prefix.size());
  if (t >= game_.horizon) throw ProtocolError("minimax: game is over");
  const std::vector<double> cont = outcome_values(t, losses, covariate_index(x));
  std::size_t arg = 0;
  double best = kInfinity;
  for (std::size_t pi = 0; pi < game_.prediction_grid.size(); ++pi) {
    double worst = -kInfinity;
    for (std::size_t yi = 0; yi < cont.size(); ++yi) {
      worst = std::max(worst, game_.model.value_unchecked(
                                  game_.prediction_grid[pi],
                                  game_.outcome_grid[yi]) + cont[yi]);
    }
    if (worst < best - kTieSlack) {
      best = worst;
      arg = pi;
    }
  }
  return arg;
}

std::size_t MinimaxSolver::best_outcome_index(
    std::span<const PlayedRound> prefix, CovariateId x, double yhat) {
  const std::vector<double> losses = state_after(prefix);
  const int t = static_cast<int>(prefix.size());
  if (t >= game_.horizon) throw ProtocolError("minimax: game is over");
  if (!game_.model.prediction_range().contains(yhat)) {
    throw ProtocolError("minimax: prediction outside the prediction range");
  }
  const std::vector<double> cont = outcome_values(t, losses, covariate_index(x));
  std::size_t arg = 0;
  double best = -kInfinity;
  for (std::size_t yi = 0; yi < cont.size(); ++yi) {
    const double v =
        game_.model.value_unchecked(yhat, game_.outcome_grid[yi]) + cont[yi];
    if (v > best + kTieSlack) {
      best = v;
      arg = yi;
    }
  }
  return arg;
}

double minimax_value(const GameSpec& game) {
  MinimaxSolver solver(game);
  return solver.value();
}

OptimalAdversary::OptimalAdversary(std::shared_ptr<MinimaxSolver> solver)
    : solver_(std::move(solver)) {}

CovariateId OptimalAdversary::choose_covariate(
    std::span<const PlayedRound> prefix) const {
  return solver_->game().covariates[solver_->best_covariate_index(prefix)];
}

double OptimalAdversary::choose_outcome(std::span<const PlayedRound> prefix,
                                        CovariateId x, double yhat) const {
  return solver_->game()
      .outcome_grid[solver_->best_outcome_index(prefix, x, yhat)];
}

OptimalAdversary optimal_adversary(const GameSpec& game) {
  return OptimalAdversary(std::make_shared<MinimaxSolver>(game));
}

MinimaxLearner::MinimaxLearner(std::shared_ptr<MinimaxSolver> solver)
    : solver_(std::move(solver)) {}

double MinimaxLearner::predict(std::span<const PlayedRound> prefix,
                               CovariateId x) const {
  return solver_->game()
      .prediction_grid[solver_->best_prediction_index(prefix, x)];
}

GamePlay play_game(const GameSpec& game, const OptimalAdversary& adversary,
                   const LearnerPolicy& learner) {
  GamePlay play;
  std::vector<double> comparator(game.family.size(), 0.0);
  for (int t = 0; t < game.horizon; ++t) {
    const CovariateId x = adversary.choose_covariate(play.rounds);
    const double yhat = learner(play.rounds, x);
    const double y = adversary.choose_outcome(play.rounds, x, yhat);
    play.learner_loss += loss_value(game.model, yhat, y);
    for (std::size_t f = 0; f < comparator.size(); ++f) {
      comparator[f] += game.model.value_unchecked(game.family.value(f, x), y);
    }
    play.rounds.push_back({x, yhat, y});
  }
  play.comparator_loss = *std::min_element(comparator.begin(), comparator.end());
  play.regret = play.learner_loss - play.comparator_loss;
  return play;
}

std::vector<double> value_monotonicity(const GameSpec& game,
                                       std::span<const int> horizons) {
  std::vector<double> out;
  for (int h : horizons) {
    GameSpec g = game;
    g.horizon = h;
    out.push_back(minimax_value(g));
  }
  return out;
}

}  // namespace seqreg
