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
#include "seqreg/trees.hpp"

using namespace seqreg;

TEST_CASE("labels along paths") {
  const RealTree root(Levels<double>{{7.0}});
  CHECK(root.label_at(1, SignPath({-1})) == 7.0);
  CHECK(root.label_at(1, SignPath({1})) == 7.0);

  const RealTree two(Levels<double>{{0.0}, {3.0, 4.0}});
  CHECK(two.label_at(2, SignPath({1, -1})) == 4.0);
  CHECK(two.label_at(2, SignPath({-1, 1})) == 3.0);

  const RealTree c = RealTree::constant(4, 2.5);
  for (const SignPath& p : all_paths(4)) {
    for (int t = 1; t <= 4; ++t) CHECK(c.label_at(t, p) == 2.5);
  }
  CHECK_THROWS_AS(RealTree(Levels<double>{{0.0}, {1.0}}), ShapeError);
  CHECK_THROWS_AS(two.label_at(3, SignPath({1, 1})), IndexError);
}

TEST_CASE("path enumeration") {
  std::vector<SignPath> one(all_paths(1).begin(), all_paths(1).end());
  REQUIRE(one.size() == 2);
  CHECK(one[0] == SignPath({-1}));
  CHECK(one[1] == SignPath({1}));

  std::vector<SignPath> two(all_paths(2).begin(), all_paths(2).end());
  REQUIRE(two.size() == 4);
  CHECK(two[0] == SignPath({-1, -1}));
  CHECK(two[1] == SignPath({-1, 1}));
  CHECK(two[3] == SignPath({1, 1}));
  CHECK(all_paths(0).size() == 1);
}

TEST_CASE("property: prefix index matches the reference walk") {
  for (int n = 1; n <= 6; ++n) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      const SignPath p = SignPath::from_bits(bits, n);
      const auto s = oracle::signs(bits, n);
      CHECK(p.signs() == s);
      for (int t = 1; t <= n; ++t) CHECK(p.prefix_index(t) == oracle::node_of(s, t));
    }
  }
}

TEST_CASE("composition with a family") {
  Eigen::MatrixXd v(2, 3);
  v << 0.1, 0.2, 0.3, -1.0, 0.0, 1.0;
  const auto F = ComparatorFamily::finite_table(v);
  const CovariateTree x(Levels<CovariateId>{{2}, {0, 1}});
  const RealTree fx = compose(x, F, std::size_t{1});
  for (const SignPath& p : all_paths(2)) {
    for (int t = 1; t <= 2; ++t) {
      CHECK(fx.label_at(t, p) == F.value(1, x.label_at(t, p)));
    }
  }
  const auto consts = ComparatorFamily::constants(std::vector<double>{-0.5, 0.5}, 3);
  CHECK(compose(x, consts, std::size_t{0}) == RealTree::constant(2, -0.5));

  // map_tree with the identity leaves a real tree unchanged.
  const RealTree r(Levels<double>{{1.0}, {2.0, 3.0}});
  CHECK(map_tree(r, [](double a) { return a; }) == r);
}
