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
#include "seqreg/comparators.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/rng.hpp"

using namespace seqreg;
using doctest::Approx;

namespace {
Eigen::MatrixXd table(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}
}  // namespace

TEST_CASE("evaluation") {
  const auto F = ComparatorFamily::finite_table(table({{1, -1}, {0, 0}}));
  CHECK(F.evaluate(std::size_t{0}, CovariateId{1}) == -1.0);
  CHECK_THROWS_AS(F.evaluate(std::size_t{2}, CovariateId{0}), LookupError);
  CHECK_THROWS_AS(F.evaluate(std::size_t{0}, CovariateId{5}), LookupError);

  const auto lin = ComparatorFamily::linear(2);
  CHECK(lin.evaluate(Eigen::Vector2d(1, 2), Eigen::VectorXd(Eigen::Vector2d(3, -1))) ==
        Approx(1.0));
  CHECK_THROWS_AS(lin.evaluate(Eigen::Vector2d(1, 2), CovariateId{0}), LookupError);

  const auto sp = ComparatorFamily::sparse_convex(table({{1}, {0}, {-1}}), 2);
  CHECK(sp.evaluate(SparseWeights{{0, 1}, {0.5, 0.5}}, CovariateId{0}) == Approx(0.5));
  CHECK_THROWS_AS(sp.evaluate(SparseWeights{{0, 1, 2}, {0.2, 0.3, 0.5}}, CovariateId{0}),
                  LookupError);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(ComparatorFamily::finite_table(Eigen::MatrixXd(0, 0)), ShapeError);
  CHECK_THROWS_AS(ComparatorFamily::linear(0), DomainError);
  CHECK_THROWS_AS(ComparatorFamily::sparse_convex(table({{2.0}}), 1), DomainError);
}

TEST_CASE("best comparator loss") {
  const LossModel sq = LossModel::square(1.0);
  const auto zero = ComparatorFamily::finite_table(table({{0.0}}));
  const History h = {{CovariateId{0}, 1.0}, {CovariateId{0}, -1.0}};
  CHECK(best_comparator_loss(zero, sq, h) == Approx(2.0));

  // min_w (w - 1)^2 + w^2 = 1/2 at w = 1/2.
  const auto lin = ComparatorFamily::linear(1);
  const History h1 = {{Eigen::VectorXd::Ones(1), 1.0}};
  CHECK(best_comparator_loss(lin, sq, h1, 1.0) == Approx(0.5));
  CHECK(ridge_solution(h1, 1, 1.0)(0) == Approx(0.5));

  const auto pm = ComparatorFamily::finite_table(table({{1.0}, {-1.0}}));
  CHECK(best_comparator_loss(pm, LossModel::absolute(1.0),
                             History{{CovariateId{0}, 1.0}}) == 0.0);
  CHECK_THROWS_AS(best_comparator_loss(lin, LossModel::absolute(1.0), h1), CapabilityError);
}

TEST_CASE("property: ridge optimum beats random weights") {
  PortableRng rng(5);
  const LossModel sq = LossModel::square(1.0);
  const auto lin = ComparatorFamily::linear(3);
  for (int rep = 0; rep < 20; ++rep) {
    History h;
    for (int t = 0; t < 15; ++t) {
      Eigen::VectorXd x(3);
      for (int i = 0; i < 3; ++i) x(i) = rng.uniform(-1, 1);
      h.push_back({x, rng.uniform(-1, 1)});
    }
    const double best = best_comparator_loss(lin, sq, h, 0.5);
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXd w(3);
      for (int i = 0; i < 3; ++i) w(i) = rng.uniform(-2, 2);
      double v = 0.5 * w.squaredNorm();
      for (const Observation& o : h) {
        const double r = w.dot(std::get<Eigen::VectorXd>(o.x)) - o.y;
        v += r * r;
      }
      CHECK(best <= v + 1e-10);
    }
  }
}

TEST_CASE("cumulative loss of one member") {
  const auto F = ComparatorFamily::finite_table(table({{0.5, -0.5}}));
  const History h = {{CovariateId{0}, 1.0}, {CovariateId{1}, 0.0}};
  CHECK(cumulative_loss(F, LossModel::square(1.0), std::size_t{0}, h) == Approx(0.5));
  CHECK(cumulative_loss(F, LossModel::absolute(1.0), std::size_t{0}, h) == Approx(1.0));
}

TEST_CASE("binomial") {
  CHECK(binomial(8, 2) == 28);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(200, 100) == UINT64_MAX);
}
