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

#include <cmath>

#include "doctest.h"
#include "seqreg/errors.hpp"
#include "seqreg/forecasters.hpp"
#include "seqreg/rng.hpp"

using namespace seqreg;
using doctest::Approx;

namespace {

ComparatorFamily random_family(PortableRng& rng, std::size_t k, std::size_t m) {
  Eigen::MatrixXd v(k, m);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) v(i, j) = rng.uniform(-1, 1);
  }
  return ComparatorFamily::finite_table(v);
}

History random_history(PortableRng& rng, std::size_t m, int len) {
  History h;
  for (int t = 0; t < len; ++t) h.push_back({CovariateId{rng.below(m)}, rng.uniform(-1, 1)});
  return h;
}

Eigen::VectorXd ball_point(PortableRng& rng, int d) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  return v * (std::pow(rng.uniform(), 1.0 / d) / v.norm());
}

Eigen::MatrixXd column(std::initializer_list<double> v) {
  Eigen::MatrixXd m(v.size(), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

const std::vector<double> kPm = {-1.0, 1.0};

}  // namespace

TEST_CASE("experts relaxation") {
  const auto F = ComparatorFamily::finite_table(column({0.5, -0.2, 0.9}));
  CHECK(experts_relaxation(F, 1.0, History{}) == Approx(std::log(3.0)));
  CHECK(experts_relaxation(F, 2.0, History{}) == Approx(4 * std::log(3.0)));

  const auto one = ComparatorFamily::finite_table(column({0.5}));
  const History h = {{CovariateId{0}, 1.0}, {CovariateId{0}, -0.5}};
  CHECK(experts_relaxation(one, 1.0, h) == Approx(-(0.25 + 1.0)));
  const auto twice = ComparatorFamily::finite_table(column({0.5, 0.5}));
  CHECK(experts_relaxation(twice, 1.0, h) ==
        Approx(std::log(2.0) + experts_relaxation(one, 1.0, h)));
}

TEST_CASE("experts forecast") {
  const auto one = ComparatorFamily::finite_table(column({0.3}));
  CHECK(experts_forecast(one, 1.0, History{}, CovariateId{0}) == Approx(0.3));
  const auto zeros = ComparatorFamily::finite_table(column({0.0, 0.0}));
  CHECK(experts_forecast(zeros, 1.0, History{{CovariateId{0}, 0.7}}, CovariateId{0}) ==
        Approx(0.0));
}

TEST_CASE("property: closed form, generic search and the stateful forecaster agree") {
  PortableRng rng(30);
  const LossModel sq = LossModel::square(1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const auto F = random_family(rng, 1 + rng.below(5), 3);
    const int n = 6;
    const History h = random_history(rng, 3, static_cast<int>(rng.below(n)));
    const CovariateId x = rng.below(3);
    const double temp = rep % 2 ? 2.0 : 0.0;
    const RelaxationOracle rel = experts_oracle(F, 1.0, n, temp);
    const double closed = experts_forecast(F, 1.0, h, x, temp);
    CHECK(relaxation_forecast(rel, sq, h, x, Interval{-1, 1}, kPm) == Approx(closed).epsilon(1e-9));
    CHECK(relaxation_forecast(rel, sq, h, x, Interval{-1, 1}, kPm, true) ==
          Approx(closed).epsilon(1e-6));

    auto fc = make_experts_forecaster(F, 1.0, temp);
    for (const Observation& o : h) fc->observe(o.x, o.y);
    CHECK(fc->predict(x) == Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("symmetric relaxation forecasts zero") {
  const auto F = ComparatorFamily::finite_table(column({1.0, -1.0}));
  const RelaxationOracle rel = experts_oracle(F, 1.0, 3);
  CHECK(relaxation_forecast(rel, LossModel::square(1.0), History{}, CovariateId{0},
                            Interval{-1, 1}, kPm) == Approx(0.0));
  const std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  CHECK(relaxation_forecast(zero_oracle(3), LossModel::square(1.0), History{}, CovariateId{0},
                            grid, kPm) == 0.0);
}

TEST_CASE("vaw forecast") {
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  CHECK(vaw_forecast(History{}, one, 1.0, 1.0) == 0.0);
  CHECK(vaw_forecast(History{{one, 1.0}}, one, 1.0, 1.0) == Approx(1.0 / 3));
  const History h = {{Eigen::VectorXd(Eigen::Vector2d(1, 0)), 0.8}};
  CHECK(vaw_forecast(h, Eigen::Vector2d(0, 1), 1.0, 1.0) == Approx(0.0));
  // Large responses are clipped.
  // 0.5 / (10 * 0.01 + 0.25 + 0.01) exceeds 1.
  History small(10, Observation{0.1 * one, 1.0});
  CHECK(vaw_forecast(small, 0.5 * one, 0.01, 1.0) == 1.0);
}

TEST_CASE("vaw relaxation") {
  CHECK(vaw_relaxation(History{}, 1.0, 1.0, 8, 1) == Approx(4 * std::log(8.0)));
  const History h = {{Eigen::VectorXd(Eigen::Vector2d(0.3, -0.4)), 0.5}};
  History h2 = h;
  h2.push_back({Eigen::VectorXd(Eigen::Vector2d::Zero()), 0.7});
  CHECK(vaw_relaxation(h2, 1.0, 1.0, 8, 2) ==
        Approx(vaw_relaxation(h, 1.0, 1.0, 8, 2) - 0.49));
}

TEST_CASE("property: stateful VAW matches the batch formula") {
  PortableRng rng(31);
  for (int d : {1, 3}) {
    auto fc = make_vaw_forecaster(d, 0.7, 1.0);
    History h;
    for (int t = 0; t < 60; ++t) {
      const Eigen::VectorXd x = ball_point(rng, d);
      CHECK(fc->predict(x) == Approx(vaw_forecast(h, x, 0.7, 1.0)).epsilon(1e-10));
      const double y = rng.uniform(-1, 1);
      fc->observe(x, y);
      h.push_back({x, y});
    }
  }
}

TEST_CASE("admissibility checker") {
  PortableRng rng(32);
  const LossModel sq = LossModel::square(1.0);
  AdmissibilityGrids grids;
  grids.covariates = {CovariateId{0}, CovariateId{1}};
  grids.outcome_grid = kPm;
  const int n = 3;
  const auto hs = enumerate_histories(grids.covariates, grids.outcome_grid, n);
  CHECK(hs.size() == 64);

  SUBCASE("mixable temperature is admissible") {
    for (int rep = 0; rep < 5; ++rep) {
      const auto F = random_family(rng, 1 + rng.below(4), 2);
      const auto r = check_admissibility(experts_oracle(F, 1.0, n, 2.0), sq, grids, hs);
      CHECK(r.admissible());
      CHECK(r.empty_value == Approx(2 * std::log(static_cast<double>(F.size()))));
    }
  }
  SUBCASE("zero relaxation with zero loss") {
    const StageLoss none = [](double, double) { return 0.0; };
    const auto r = check_admissibility(zero_oracle(n), none, grids, hs);
    CHECK(r.admissible());
  }
  SUBCASE("a relaxation dropped at the last round is flagged") {
    const auto F = random_family(rng, 3, 2);
    RelaxationOracle broken = experts_oracle(F, 1.0, n, 2.0);
    const RelaxationFn base = broken.evaluate;
    broken.evaluate = [base](std::span<const Observation> h) {
      return base(h) - (h.size() == 3 ? 10.0 : 0.0);
    };
    const auto r = check_admissibility(broken, sq, grids, hs);
    CHECK_FALSE(r.admissible());
    CHECK(r.initial_margin < -1.0);
    REQUIRE(r.worst_initial_site);
    CHECK(r.worst_initial_site->t == n);
  }
}

TEST_CASE("property: VAW one-step margins are nonnegative on unit-ball data") {
  PortableRng rng(33);
  const LossModel sq = LossModel::square(1.0);
  for (int d : {1, 2}) {
    const int n = 5;
    AdmissibilityGrids g;
    for (int k = 0; k < 4; ++k) g.covariates.push_back(ball_point(rng, d));
    g.outcome_grid = kPm;
    std::vector<History> hs;
    for (int i = 0; i < 10; ++i) {
      History h;
      for (int t = 0; t < n; ++t) h.push_back({ball_point(rng, d), rng.uniform(-1, 1)});
      hs.push_back(h);
    }
    const auto r = check_admissibility(vaw_oracle(d, 1.0, 1.0, n), sq, g, hs);
    CHECK(r.worst_round_margin() >= -1e-8);
    CHECK(r.worst_recipe_margin() >= -1e-8);
  }
}

TEST_CASE("online runs") {
  PortableRng rng(34);
  const LossModel sq = LossModel::square(1.0);
  const auto one = ComparatorFamily::finite_table(column({0.2}));
  const History seq = random_history(rng, 1, 50);
  auto mimic = make_comparator_forecaster(one, std::size_t{0});
  CHECK(run_online(*mimic, seq, sq, one).final_regret == Approx(0.0).epsilon(1e-12));

  const auto F = random_family(rng, 4, 3);
  const History s2 = random_history(rng, 3, 40);
  auto fc = make_experts_forecaster(F, 1.0, 2.0);
  const RunResult r = run_online(*fc, s2, sq, F);
  REQUIRE(r.records.size() == 40);
  CHECK(r.final_regret == r.records.back().cumulative_regret);
  CHECK(r.comparator_loss == Approx(best_comparator_loss(F, sq, s2)));
  for (std::size_t t : {std::size_t{1}, std::size_t{17}, std::size_t{40}}) {
    double learner = 0.0;
    for (std::size_t i = 0; i < t; ++i) learner += r.records[i].loss;
    const double cmp = best_comparator_loss(F, sq, std::span(s2).first(t));
    CHECK(r.records[t - 1].cumulative_regret == Approx(learner - cmp).epsilon(1e-12));
  }
  CHECK(run_online(*fc, History{}, sq, F).final_regret == 0.0);
}

TEST_CASE("regret bounds") {
  BoundParams p;
  p.B = 2.0;
  p.family_size = 10;
  CHECK(regret_bound(BoundKind::kExperts, p) == Approx(4 * std::log(10.0)));
  p.B = 1.0;
  p.n = 100;
  p.d = 1;
  p.lambda = 1.0;
  CHECK(regret_bound(BoundKind::kVaw, p) == Approx(4 * std::log(100.0)));
  p.n = 1;
  p.d = 2;
  CHECK_THROWS_AS(regret_bound(BoundKind::kVaw, p), DomainError);
}
