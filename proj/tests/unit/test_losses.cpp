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
#include "seqreg/losses.hpp"
#include "seqreg/rng.hpp"

using namespace seqreg;
using doctest::Approx;

TEST_CASE("loss values on hand-computed points") {
  CHECK(loss_value(LossModel::square(1.0), 0.5, 1.0) == Approx(0.25));
  for (double x : {-0.7, 0.0, 0.3}) {
    CHECK(loss_value(LossModel::absolute(1.0), x, x) == 0.0);
  }
  CHECK(loss_value(LossModel::q_loss(1.5, 1.0), 0.0, 1.0) == Approx(1.0));
}

TEST_CASE("subgradients") {
  CHECK(loss_subgradient(LossModel::square(1.0), 0.5, 1.0) == Approx(-1.0));
  CHECK(loss_subgradient(LossModel::absolute(2.0), 2.0, 1.0) == Approx(1.0));
  CHECK(loss_subgradient(LossModel::logistic(1.0), 0.0, 1.0) == Approx(-0.5));
}

TEST_CASE("subgradient agrees with central differences away from kinks") {
  PortableRng rng(1);
  const LossModel models[] = {LossModel::square(1.0), LossModel::q_loss(1.5, 1.0),
                              LossModel::logistic(1.0)};
  for (const LossModel& m : models) {
    for (int i = 0; i < 200; ++i) {
      const double y = rng.uniform(-1, 1);
      const double a = rng.uniform(-0.99, 0.99);
      if (std::abs(a - y) < 1e-3) continue;
      const double h = 1e-6;
      const double fd = (loss_value(m, a + h, y) - loss_value(m, a - h, y)) / (2 * h);
      CHECK(loss_subgradient(m, a, y) == Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("taylor residual") {
  const LossModel sq = LossModel::square(1.0);
  PortableRng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
    CHECK(taylor_residual(sq, a, b, y) == Approx((b - a) * (b - a)));
    CHECK(taylor_residual(sq, a, a, y) == 0.0);
  }
  // q = 1.5 at (0, 0.5, 1): the residual evaluated in a different order.
  const LossModel q = LossModel::q_loss(1.5, 1.0);
  const long double l_b = std::pow(0.5L, 1.5L), l_a = 1.0L, g_a = -1.5L;
  const long double expected = l_b - l_a - g_a * 0.5L;
  CHECK(std::abs(taylor_residual(q, 0.0, 0.5, 1.0) - static_cast<double>(expected)) < 1e-12);
}

TEST_CASE("curvature envelopes") {
  CHECK(delta_lower(LossModel::square(1.0), 0.3) == Approx(0.09));
  CHECK(delta_upper(LossModel::square(1.0), 0.3) == Approx(0.09));
  CHECK(delta_lower(LossModel::absolute(1.0), 0.7) == 0.0);
  CHECK(delta_upper(LossModel::q_loss(1.5, 1.0), 0.2) == Approx(0.06));
  // Minorant constant q(q-1)(2B)^(q-2)/2 for q in (1, 2).
  CHECK(delta_lower(LossModel::q_loss(1.5, 1.0), 0.2) ==
        Approx(0.375 * std::pow(2.0, -0.5) * 0.04));
  for (const LossModel& m : {LossModel::square(1.0), LossModel::q_loss(1.5, 1.0)}) {
    CHECK(delta_lower(m, 0.0) == 0.0);
    CHECK(delta_upper(m, 0.0) == 0.0);
  }
  CHECK_THROWS_AS(delta_upper(LossModel::absolute(1.0), 0.1), CapabilityError);
}

TEST_CASE("property: the lower envelope minorizes the taylor residual") {
  PortableRng rng(3);
  const LossModel models[] = {LossModel::square(1.0), LossModel::absolute(1.0),
                              LossModel::q_loss(1.5, 1.0), LossModel::q_loss(1.2, 2.0),
                              LossModel::logistic(1.0)};
  for (const LossModel& m : models) {
    const Interval p = m.prediction_range();
    for (int i = 0; i < 2000; ++i) {
      const double a = rng.uniform(p.lo, p.hi), b = rng.uniform(p.lo, p.hi);
      const double y = rng.uniform(-m.B(), m.B());
      CHECK(delta_lower(m, b - a) <= taylor_residual(m, a, b, y) + 1e-12);
    }
  }
}

TEST_CASE("the q-loss constant q(q-1)/2 is not a minorant") {
  // Documents why the smaller constant is used.
  const LossModel q = LossModel::q_loss(1.5, 1.0);
  const double residual = taylor_residual(q, -1.0, -0.8, 1.0);
  CHECK(residual < 0.375 * 0.04);
  CHECK(delta_lower(q, 0.2) <= residual);
}

TEST_CASE("property: the square-loss upper envelope majorizes the residual") {
  PortableRng rng(4);
  const LossModel m = LossModel::square(1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
    CHECK(taylor_residual(m, a, b, y) <= delta_upper(m, b - a) + 1e-12);
  }
}

TEST_CASE("conjugate offset") {
  const LossModel sq = LossModel::square(1.0);
  CHECK(gamma_star(sq, 0.5) == 0.0);
  CHECK(gamma_star(sq, 1.0) == 0.0);
  CHECK(std::isinf(gamma_star(sq, 1.5)));
  // Delta(t) = t^4: sup_u {s u - u^2} = s^2 / 4, checked on a dense grid.
  double grid_sup = 0.0;
  for (int i = 0; i <= 400000; ++i) {
    const double u = i * 1e-5;
    grid_sup = std::max(grid_sup, 2.0 * u - u * u);
  }
  CHECK(power_gamma_star(1.0, 4.0, 2.0) == Approx(grid_sup).epsilon(1e-9));
  CHECK(power_gamma_star(1.0, 4.0, 2.0) <= 4.0 / std::exp(1.0));
  CHECK_THROWS_AS(gamma_star(sq, -1.0), DomainError);
}

TEST_CASE("property: conjugate is nondecreasing") {
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = power_gamma_star(0.7, 3.0, 0.05 * i);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("two-point witness") {
  const LossModel sq = LossModel::square(1.0);
  const TwoPointWitness w = two_point_witness(sq, 0.25);
  CHECK(loss_subgradient(sq, 0.25, w.y_plus) == Approx(w.R));
  CHECK(loss_subgradient(sq, 0.25, w.y_minus) == Approx(-w.R));
  CHECK_THROWS_AS(two_point_witness(sq, 1.0), DomainError);
}

TEST_CASE("configuration") {
  LossConfig c;
  c.name = "q_loss";
  c.q = 1.5;
  c.B = 2.0;
  const LossModel m = LossModel::from_config(c);
  CHECK(m.q() == 1.5);
  CHECK(m.B() == 2.0);
  CHECK(LossModel::from_config(m.config()).config().name == "q_loss");
  c.name = "hinge";
  CHECK_THROWS_AS(LossModel::from_config(c), ConfigError);
  CHECK_THROWS_AS(LossModel::square(-1.0), DomainError);
  CHECK_THROWS_AS(loss_value(LossModel::square(1.0), 0.0, 3.0), DomainError);
}
