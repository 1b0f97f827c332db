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

#include "doctest.h"
#include "oracles.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/minimax.hpp"
#include "seqreg/rng.hpp"

using namespace seqreg;
using doctest::Approx;

namespace {

GameSpec pm_absolute(int n) {
  GameSpec g;
  g.family = ComparatorFamily::constants(std::vector<double>{1.0, -1.0}, 1);
  g.model = LossModel::absolute(1.0);
  g.horizon = n;
  g.covariates = {0};
  g.outcome_grid = {-1.0, 1.0};
  g.prediction_grid = {-1.0, 0.0, 1.0};
  return g;
}

GameSpec singleton(int n) {
  GameSpec g;
  Eigen::MatrixXd v(1, 2);
  v << 0.5, -0.5;
  g.family = ComparatorFamily::finite_table(v);
  g.model = LossModel::square(1.0);
  g.horizon = n;
  g.covariates = {0, 1};
  g.outcome_grid = {-1.0, 0.0, 1.0};
  g.prediction_grid = {-0.5, 0.0, 0.5};
  return g;
}

}  // namespace

TEST_CASE("values of small games") {
  CHECK(minimax_value(pm_absolute(1)) == Approx(1.0));
  CHECK(minimax_value(pm_absolute(0)) == 0.0);
  CHECK(minimax_value(singleton(3)) == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimal adversary on the one-round game") {
  const OptimalAdversary adv = optimal_adversary(pm_absolute(1));
  const std::vector<PlayedRound> empty;
  CHECK(adv.choose_covariate(empty) == 0);
  CHECK(adv.choose_outcome(empty, 0, 0.0) == -1.0);
  CHECK(adv.choose_outcome(empty, 0, 0.5) == -1.0);
  CHECK(adv.choose_outcome(empty, 0, -0.5) == 1.0);
}

TEST_CASE("mimicking the only comparator never loses") {
  const GameSpec g = singleton(3);
  const OptimalAdversary adv = optimal_adversary(g);
  const LearnerPolicy mimic = [&g](std::span<const PlayedRound>, CovariateId x) {
    return g.family.value(0, x);
  };
  const GamePlay a = play_game(g, adv, mimic);
  CHECK(a.regret <= 1e-12);
  const GamePlay b = play_game(g, adv, mimic);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    CHECK(a.rounds[i].x == b.rounds[i].x);
    CHECK(a.rounds[i].y == b.rounds[i].y);
  }
}

TEST_CASE("value monotonicity") {
  const std::vector<int> h123 = {1, 2, 3};
  const auto v = value_monotonicity(pm_absolute(1), h123);
  CHECK(v[0] == Approx(1.0));
  CHECK(v[1] >= v[0]);
  CHECK(v[2] >= v[1]);
  const std::vector<int> h0123 = {0, 1, 2, 3};
  const auto w = value_monotonicity(singleton(1), h0123);
  for (double x : w) CHECK(x == Approx(0.0).epsilon(1e-12));
  CHECK(value_monotonicity(pm_absolute(1), h0123)[0] == 0.0);
}

TEST_CASE("property: memoized solver matches plain recursion") {
  PortableRng rng(20);
  for (int rep = 0; rep < 25; ++rep) {
    GameSpec g;
    const std::size_t k = 1 + rng.below(3), m = 1 + rng.below(2);
    Eigen::MatrixXd v(k, m);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < m; ++j) v(i, j) = 0.5 * (static_cast<double>(rng.below(5)) - 2.0);
    }
    g.family = ComparatorFamily::finite_table(v);
    g.model = rep % 2 ? LossModel::square(1.0) : LossModel::absolute(1.0);
    g.horizon = 1 + static_cast<int>(rng.below(3));
    for (std::size_t x = 0; x < m; ++x) g.covariates.push_back(x);
    g.outcome_grid = {-1.0, 0.0, 1.0};
    g.prediction_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
    CHECK(minimax_value(g) == Approx(oracle::minimax(g)).epsilon(1e-12));
  }
}

TEST_CASE("property: optimal play realizes the value") {
  GameSpec g = pm_absolute(3);
  g.outcome_grid = {-1.0, 0.0, 1.0};
  auto solver = std::make_shared<MinimaxSolver>(g);
  const double V = solver->value();
  const OptimalAdversary adv(solver);
  const MinimaxLearner learner(solver);
  const GamePlay play = play_game(g, adv, [&learner](std::span<const PlayedRound> p,
                                                     CovariateId x) {
    return learner.predict(p, x);
  });
  CHECK(play.regret == Approx(V).epsilon(1e-12));
  // Any other grid learner suffers at least V against the optimal adversary.
  const GamePlay zero = play_game(g, adv, [](std::span<const PlayedRound>, CovariateId) {
    return 0.0;
  });
  CHECK(zero.regret >= V - 1e-12);
}

TEST_CASE("continuation and protocol errors") {
  MinimaxSolver s(pm_absolute(2));
  CHECK(s.continuation(std::vector<PlayedRound>{}) == Approx(s.value()));
  const std::vector<PlayedRound> bad = {{0, 0.0, 0.5}};
  CHECK_THROWS_AS(s.continuation(bad), ProtocolError);
  const std::vector<PlayedRound> full = {{0, 0.0, 1.0}, {0, 0.0, -1.0}};
  CHECK_THROWS_AS(s.best_prediction_index(full, 0), ProtocolError);

  GameSpec g = pm_absolute(1);
  g.outcome_grid = {};
  CHECK_THROWS_AS(validate_game(g), DomainError);
  g = pm_absolute(1);
  g.covariates = {4};
  CHECK_THROWS_AS(validate_game(g), LookupError);
  g = pm_absolute(1);
  g.family = ComparatorFamily::linear(2);
  CHECK_THROWS_AS(validate_game(g), CapabilityError);
}

TEST_CASE("learner grid tolerance") {
  // n G h / 2 with grid spacing h = 1 and G = 1.
  CHECK(learner_grid_tolerance(pm_absolute(2)) == Approx(1.0));
}
