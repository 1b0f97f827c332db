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
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "seqreg/complexity.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/rng.hpp"

using namespace seqreg;
using doctest::Approx;

namespace {

const ScalarFn kZero = [](double) { return 0.0; };
const ScalarFn kSquare = [](double x) { return x * x; };

ComparatorFamily pm_constants(std::size_t num_x = 1) {
  return ComparatorFamily::constants(std::vector<double>{1.0, -1.0}, num_x);
}

ComparatorFamily random_family(PortableRng& rng, std::size_t k, std::size_t m) {
  Eigen::MatrixXd v(k, m);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) v(i, j) = rng.uniform(-1, 1);
  }
  return ComparatorFamily::finite_table(v);
}

CovariateTree random_tree(PortableRng& rng, int n, std::size_t m) {
  return CovariateTree::generate(n, [&](int, std::uint64_t) { return rng.below(m); });
}

}  // namespace

TEST_CASE("sequential rademacher") {
  const auto single = ComparatorFamily::constants(std::vector<double>{0.4}, 2);
  CHECK(seq_rademacher(single, CovariateTree::constant(3, 1)) == Approx(0.0));
  CHECK(seq_rademacher(pm_constants(), CovariateTree::constant(1, 0)) == Approx(1.0));
  CHECK(seq_rademacher(pm_constants(), CovariateTree::constant(2, 0)) == Approx(1.0));
}

TEST_CASE("property: rademacher and offset match path enumeration") {
  PortableRng rng(10);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const auto F = random_family(rng, 1 + rng.below(4), 3);
    const auto x = random_tree(rng, n, 3);
    const auto mu = RealTree::generate(n, [&](int, std::uint64_t) { return rng.uniform(-1, 1); });
    const double C = rng.uniform(0.1, 2.0);
    CHECK(seq_rademacher(F, x) == Approx(oracle::seq_rademacher(F, x)).epsilon(1e-12));
    CHECK(offset_rademacher(F, x, mu, C, kSquare) ==
          Approx(oracle::offset_rademacher(F, x, mu, C, kSquare)).epsilon(1e-12));
    CHECK(offset_rademacher(F, x, mu, C, kZero) ==
          Approx(2 * C * seq_rademacher(F, x)).epsilon(1e-12));
  }
}

TEST_CASE("offset rademacher examples") {
  // E|e1 + e2| - 2.
  CHECK(offset_rademacher(pm_constants(), CovariateTree::constant(2, 0),
                          RealTree::constant(2, 0.0), 0.5, kSquare) == Approx(-1.0));
  CHECK(offset_rademacher(pm_constants(), CovariateTree::constant(0, 0),
                          RealTree::constant(0, 0.0), 1.0, kSquare) == 0.0);
  const Expectation e = offset_rademacher_estimate(
      pm_constants(), CovariateTree::constant(3, 0), RealTree::constant(3, 0.0), 1.0, kSquare);
  CHECK(e.exact);
  CHECK(e.value == Approx(offset_rademacher(pm_constants(), CovariateTree::constant(3, 0),
                                            RealTree::constant(3, 0.0), 1.0, kSquare)));
}

TEST_CASE("supremum over trees") {
  const std::vector<CovariateId> x0 = {0};
  const std::vector<double> mu0 = {0.0};
  CHECK(offset_rademacher_sup(pm_constants(), x0, mu0, 0, 1.0, kSquare) == 0.0);
  const auto single = ComparatorFamily::constants(std::vector<double>{0.3}, 2);
  const std::vector<CovariateId> x01 = {0, 1};
  const std::vector<double> mus = {-1.0, 0.0, 1.0};
  CHECK(offset_rademacher_sup(single, x01, mus, 3, 1.0, kZero) == Approx(0.0).epsilon(1e-12));
  CHECK(offset_rademacher_sup(pm_constants(), x0, mu0, 1, 0.5, kSquare) == Approx(0.0));
}

TEST_CASE("property: supremum equals the best labelled tree") {
  PortableRng rng(11);
  const std::vector<CovariateId> xs = {0, 1};
  const std::vector<double> mus = {-0.5, 0.5};
  for (int rep = 0; rep < 6; ++rep) {
    const auto F = random_family(rng, 3, 2);
    const double C = rng.uniform(0.2, 1.5);
    // Depth 2: three nodes, each with a covariate and a mean label.
    double best = -oracle::kInf;
    for (int code = 0; code < 64; ++code) {
      const CovariateTree x(Levels<CovariateId>{{xs[code & 1]}, {xs[(code >> 1) & 1], xs[(code >> 2) & 1]}});
      const RealTree mu(Levels<double>{{mus[(code >> 3) & 1]}, {mus[(code >> 4) & 1], mus[(code >> 5) & 1]}});
      best = std::max(best, oracle::offset_rademacher(F, x, mu, C, kSquare));
    }
    CHECK(offset_rademacher_sup(F, xs, mus, 2, C, kSquare) == Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("finite-class offset bound") {
  const LossModel sq = LossModel::square(1.0);
  const ScalarFn gs = [&sq](double s) { return gamma_star(sq, s); };
  CHECK(finite_class_offset_bound(4, 5, 1.0, gs) == Approx(2 * std::log(4.0)).epsilon(1e-9));
  CHECK(finite_class_offset_bound(1, 5, 1.0, gs) == Approx(0.0).epsilon(1e-9));

  // Gamma*(s) = s^2 / 4 with n = 2, C = 1: inf over lambda of log 4 / lambda + 2 lambda^2.
  const ScalarFn quartic = [](double s) { return s * s / 4; };
  double grid_min = oracle::kInf;
  for (int i = 1; i <= 2000000; ++i) {
    const double lambda = i * 1e-6;
    grid_min = std::min(grid_min, std::log(4.0) / lambda + 2 * lambda * lambda);
  }
  CHECK(std::abs(finite_class_offset_bound(4, 2, 1.0, quartic) - grid_min) < 1e-6);
}

TEST_CASE("finite-class linear bound") {
  const std::vector<RealTree> pm = {RealTree::constant(4, 1.0), RealTree::constant(4, -1.0)};
  CHECK(finite_class_linear_bound(pm, 1.0) == Approx(std::sqrt(2 * std::log(2.0) * 4)));
  const std::vector<RealTree> one = {RealTree::constant(4, 1.0)};
  CHECK(finite_class_linear_bound(one, 1.0) == 0.0);
  const std::vector<RealTree> zeros = {RealTree::constant(3, 0.0), RealTree::constant(3, 0.0)};
  CHECK(finite_class_linear_bound(zeros, 1.0) == 0.0);
}

TEST_CASE("sequential covers") {
  const auto x2 = CovariateTree::constant(2, 0);
  CHECK(seq_cover_number(pm_constants(), x2, 2.0, CoverNorm::kLinf).size == 1);
  const auto single = ComparatorFamily::constants(std::vector<double>{0.2}, 1);
  CHECK(seq_cover_number(single, x2, 0.01, CoverNorm::kL2).size == 1);
  const CoverReport r = seq_cover_number(pm_constants(), x2, 0.5, CoverNorm::kLinf);
  CHECK(r.size == 2);
  CHECK(verify_cover(pm_constants(), x2, r));
}

TEST_CASE("property: covers verify and the l2 cover is no larger") {
  PortableRng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const auto F = random_family(rng, 2 + rng.below(4), 3);
    const auto x = random_tree(rng, n, 3);
    const double beta = rng.uniform(0.1, 1.5);
    const CoverReport l2 = seq_cover_number(F, x, beta, CoverNorm::kL2);
    const CoverReport linf = seq_cover_number(F, x, beta, CoverNorm::kLinf);
    CHECK(verify_cover(F, x, l2));
    CHECK(verify_cover(F, x, linf));
    CHECK(l2.size <= linf.size);
    CHECK(linf.size <= F.size());
  }
}

TEST_CASE("fat-shattering") {
  const std::vector<CovariateId> x0 = {0};
  const auto r = fat_shattering(pm_constants(), x0, 2.0, 3);
  CHECK(r.dimension == 1);
  REQUIRE(r.certificate);
  CHECK(r.certificate->witness.node(1, 0) == Approx(0.0));
  CHECK(verify_shatter_certificate(pm_constants(), *r.certificate, 2.0));

  const auto single = ComparatorFamily::constants(std::vector<double>{0.0}, 1);
  CHECK(fat_shattering(single, x0, 0.5, 3).dimension == 0);

  // Root covariate 0; covariate 1 follows eps_1 = -1 and covariate 2 follows +1.
  Eigen::MatrixXd v(4, 3);
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const int f = 2 * s1 + s2;
      v(f, 0) = s1 ? 1 : -1;
      v(f, 1) = s1 ? 0 : (s2 ? 1 : -1);
      v(f, 2) = s1 ? (s2 ? 1 : -1) : 0;
    }
  }
  const auto F = ComparatorFamily::finite_table(v);
  const std::vector<CovariateId> xs = {0, 1, 2};
  const auto r2 = fat_shattering(F, xs, 2.0, 3);
  CHECK(r2.dimension == 2);
  REQUIRE(r2.certificate);
  CHECK(verify_shatter_certificate(F, *r2.certificate, 2.0));
}

TEST_CASE("cover from fat-shattering") {
  CHECK(cover_fat_bound(0.5, 10, 0) == 1.0);
  CHECK(cover_fat_bound(2 * std::numbers::e * 3, 3, 4) == Approx(1.0));
  CHECK(cover_fat_bound(1.0, 2, 1) == Approx(4 * std::numbers::e));
}

TEST_CASE("dudley integral") {
  const ScalarFn zero = [](double) { return 0.0; };
  CHECK(dudley_bound(zero, 10, 0.3, 1.0) == Approx(12.0));
  const ScalarFn inv = [](double d) { return 1.0 / d; };
  CHECK(dudley_bound(inv, 100, 0.01, 1.0) == Approx(220.0).epsilon(1e-6));
  CHECK(dudley_bound(inv, 100, 0.5, 0.5) == Approx(200.0));
}

TEST_CASE("property: exact entropy-profile minimum matches a dense search") {
  PortableRng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2;
    const auto F = random_family(rng, 4, 2);
    const auto x = random_tree(rng, n, 2);
    const EntropyProfile prof = cover_entropy(F, x, CoverNorm::kL2);
    const Minimum m = prof.dudley_minimum(n, 2.0);
    double grid = oracle::kInf;
    for (int i = 1; i <= 4000; ++i) {
      const double rho = 2.0 * i / 4000;
      grid = std::min(grid, dudley_bound(prof, n, rho, 2.0));
    }
    CHECK(m.value <= grid + 1e-9);
    CHECK(m.value == Approx(dudley_bound(prof, n, m.argmin, 2.0)).epsilon(1e-9));
    CHECK(seq_rademacher(F, x) <= m.value + 1e-12);
  }
}

TEST_CASE("chained offset bound") {
  const LossModel sq = LossModel::square(1.0);
  const ScalarFn gs = [&sq](double s) { return gamma_star(sq, s); };
  const ScalarFn zero = [](double) { return 0.0; };
  CHECK(chained_offset_bound(zero, 0, 1.0, gs) == Approx(0.0));
  CHECK(chained_offset_bound(zero, 50, 1.0, gs) < 1e-3);

  // Dense grid over (gamma, rho, lambda) with log N(delta) = 1 / delta.
  const int n = 100;
  const double C = 1.0;
  const ScalarFn inv = [](double d) { return 1.0 / d; };
  double grid = oracle::kInf;
  for (int i = 0; i < 120; ++i) {
    const double gamma = std::exp(-6.0 + 12.0 * i / 119);
    double inner_rho = oracle::kInf;
    for (int j = 1; j <= 120; ++j) {
      const double rho = gamma * j / 120;
      inner_rho = std::min(inner_rho, 4 * rho * n + 24 * std::sqrt(n) *
                                                        (std::sqrt(gamma) - std::sqrt(rho)));
    }
    double inner_lambda = oracle::kInf;
    for (int k = 0; k < 120; ++k) {
      const double lambda = std::exp(-8.0 + 10.0 * k / 119);
      inner_lambda = std::min(inner_lambda, inv(gamma / 2) / lambda + n * gs(2 * C * C * lambda));
    }
    grid = std::min(grid, C * inner_rho + inner_lambda);
  }
  const double v = chained_offset_bound(inv, n, C, gs);
  CHECK(v <= grid * 1.05);
  CHECK(v >= grid / 1.05);
}

TEST_CASE("rates") {
  CHECK(rate_upper_exponent(1.0, 2.0, 1.0) == Approx(-2.0 / 3));
  CHECK(rate_lower_exponent(1.0, 2.0, 1.0) == Approx(-2.0 / 3));
  CHECK(rate_upper_exponent(2.0, 2.0, 1.0) == Approx(-0.5));
  CHECK(rate_lower_exponent(2.0, 2.0, 1.0) == Approx(-0.5));
  CHECK(rate_upper_exponent(4.0, 2.0, 1.0) == Approx(-0.25));
  CHECK(rate_lower(4.0, 2.0, 2.0, 1.0, 16) == Approx(0.5));
  CHECK(rate_lower(1.0, 2.0, 0.0, 1.0, 100) == 0.0);
}

TEST_CASE("sparse mixtures") {
  CHECK(sparse_cover_bound(5, 5, 1.0) == Approx(5.0));
  CHECK(sparse_cover_bound(1, 1, 1.0) == Approx(1.0));
  CHECK(sparse_cover_bound(8, 2, 0.5) ==
        Approx(2 * std::log(4 * std::numbers::e) + 2 * std::log(2.0)));
  CHECK(sparse_rate(8, 2, 10) == Approx(2 * std::log(4.0) / 10));
}

TEST_CASE("khinchine") {
  CHECK(khinchine_check(1).mean_abs_sum == Approx(1.0));
  CHECK(khinchine_check(2).mean_abs_sum == Approx(1.0));
  CHECK(khinchine_check(4).mean_abs_sum == Approx(1.5));
  for (int k = 1; k <= 12; ++k) {
    double sum = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
      int s = 0;
      for (int e : oracle::signs(bits, k)) s += e;
      sum += std::abs(s);
    }
    const double expected = sum / static_cast<double>(std::uint64_t{1} << k);
    const KhinchineResult r = khinchine_check(k);
    CHECK(r.mean_abs_sum == Approx(expected));
    CHECK(r.holds == (expected >= std::sqrt(k / 2.0)));
  }
  CHECK_THROWS(khinchine_check(kKhinchineGuard + 1));
}
