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

#ifndef SEQREG_MINIMAX_HPP_
#define SEQREG_MINIMAX_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "seqreg/comparators.hpp"
#include "seqreg/losses.hpp"

namespace seqreg {

// A discretized online regression game: each round the adversary picks a
// covariate, the learner a prediction from its grid, the adversary an
// outcome from its grid; the payoff is the regret against the family.
struct GameSpec {
  ComparatorFamily family = ComparatorFamily::constants(std::vector<double>{0.0});
  LossModel model = LossModel::square(1.0);
  int horizon = 0;
  std::vector<CovariateId> covariates;
  std::vector<double> outcome_grid;
  std::vector<double> prediction_grid;
};

// Throws DomainError / ShapeError / CapabilityError for inconsistent games.
void validate_game(const GameSpec& game);

// Number of memo states in the worst case times the family size.
double game_state_estimate(const GameSpec& game);

inline constexpr double kGameStateGuard = 5e7;

// n * G * h / 2 where h is the widest gap a continuum prediction can fall
// into; bounds how much a learner free to predict anywhere in the prediction
// range can gain over the grid learner.
double learner_grid_tolerance(const GameSpec& game);

struct PlayedRound {
  CovariateId x = 0;
  double yhat = 0.0;
  double y = 0.0;
};

// Backward induction over (round, cumulative comparator losses), memoized on
// loss vectors quantized at 1e-12. Not safe for concurrent use.
class MinimaxSolver {
 public:
  explicit MinimaxSolver(GameSpec game);

  const GameSpec& game() const { return game_; }

  // The discretized minimax regret V_n.
  double value();

  // Value of the remaining game after the prefix, excluding losses already
  // suffered by the learner.
  double continuation(std::span<const PlayedRound> prefix);

  // Optimal choices at the state reached by the prefix; ties go to the
  // smallest grid index.
  std::size_t best_covariate_index(std::span<const PlayedRound> prefix);
  std::size_t best_prediction_index(std::span<const PlayedRound> prefix,
                                    CovariateId x);
  std::size_t best_outcome_index(std::span<const PlayedRound> prefix,
                                 CovariateId x, double yhat);

  std::size_t memo_size() const { return memo_.size(); }

 private:
  struct Key {
    int t;
    std::vector<std::int64_t> q;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::vector<double> state_after(std::span<const PlayedRound> prefix) const;
  double solve(int t, const std::vector<double>& losses);
  // Continuation value for each outcome after covariate x.
  std::vector<double> outcome_values(int t, const std::vector<double>& losses,
                                     std::size_t xi);
  std::size_t covariate_index(CovariateId x) const;

  GameSpec game_;
  std::vector<std::vector<std::vector<double>>> comparator_loss_;  // [x][y][f]
  std::unordered_map<Key, double, KeyHash> memo_;
};

double minimax_value(const GameSpec& game);

// Adversary playing the argmax covariates and outcomes of a solved game.
class OptimalAdversary {
 public:
  explicit OptimalAdversary(std::shared_ptr<MinimaxSolver> solver);

  CovariateId choose_covariate(std::span<const PlayedRound> prefix) const;
  // yhat may be any point of the prediction range.
  double choose_outcome(std::span<const PlayedRound> prefix, CovariateId x,
                        double yhat) const;

 private:
  std::shared_ptr<MinimaxSolver> solver_;
};

OptimalAdversary optimal_adversary(const GameSpec& game);

// The grid learner achieving the minimax value.
class MinimaxLearner {
 public:
  explicit MinimaxLearner(std::shared_ptr<MinimaxSolver> solver);
  double predict(std::span<const PlayedRound> prefix, CovariateId x) const;

 private:
  std::shared_ptr<MinimaxSolver> solver_;
};

// Learner callback: prediction for covariate x after the prefix.
using LearnerPolicy =
    std::function<double(std::span<const PlayedRound>, CovariateId)>;

struct GamePlay {
  std::vector<PlayedRound> rounds;
  double learner_loss = 0.0;
  double comparator_loss = 0.0;
  double regret = 0.0;
};

// Plays the full horizon of the adversary against the learner.
GamePlay play_game(const GameSpec& game, const OptimalAdversary& adversary,
                   const LearnerPolicy& learner);

// Minimax values for each horizon.
std::vector<double> value_monotonicity(const GameSpec& game,
                                       std::span<const int> horizons);

}  // namespace seqreg

#endif  // SEQREG_MINIMAX_HPP_
