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

#include "seqreg/trees.hpp"

namespace seqreg {

SignPath::SignPath(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_) {
    if (s != 1 && s != -1) throw DomainError("sign path: entries must be +-1");
  }
  if (signs_.size() > 63) throw ResourceError("sign path: length above 63");
}

SignPath SignPath::from_bits(std::uint64_t bits, int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    s[static_cast<std::size_t>(k)] = ((bits >> (n - 1 - k)) & 1u) ? 1 : -1;
  }
  SignPath p;
  p.signs_ = std::move(s);
  return p;
}

std::uint64_t SignPath::prefix_index(int t) const {
  std::uint64_t idx = 0;
  for (int k = 0; k < t - 1; ++k) {
    idx = (idx << 1) | (signs_[static_cast<std::size_t>(k)] > 0 ? 1u : 0u);
  }
  return idx;
}

PathRange::PathRange(int n, bool allow_large) : n_(n) {
  if (n < 0) throw DomainError("all_paths: negative depth");
  if (n > 62 || (n > kPathEnumerationGuard && !allow_large)) {
    throw ResourceError("all_paths: 2^" + std::to_string(n) +
                        " paths exceed the enumeration guard of 2^" +
                        std::to_string(kPathEnumerationGuard));
  }
}

PathRange all_paths(int n, bool allow_large) { return PathRange(n, allow_large); }

RealTree compose(const CovariateTree& tree, const ComparatorFamily& family,
                 const PredictorHandle& predictor) {
  return map_tree(tree, [&](CovariateId x) {
    return family.evaluate(predictor, Covariate{x});
  });
}

RealTree compose(const LabeledTree<Covariate>& tree,
                 const ComparatorFamily& family,
                 const PredictorHandle& predictor) {
  return map_tree(tree, [&](const Covariate& x) {
    return family.evaluate(predictor, x);
  });
}

}  // namespace seqreg
