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

#ifndef SEQREG_TREES_HPP_
#define SEQREG_TREES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "seqreg/comparators.hpp"
#include "seqreg/errors.hpp"

namespace seqreg {

// Signs in {-1, +1}. Bit k of the packed form (counting from the most
// significant of n bits) is 1 iff the (k+1)-th sign is +1.
class SignPath {
 public:
  SignPath() = default;
  explicit SignPath(std::vector<int> signs);
  static SignPath from_bits(std::uint64_t bits, int n);

  int length() const { return static_cast<int>(signs_.size()); }
  // 1-based.
  int sign(int t) const { return signs_.at(static_cast<std::size_t>(t - 1)); }
  const std::vector<int>& signs() const { return signs_; }

  // Packed first t-1 signs: the node index at level t.
  std::uint64_t prefix_index(int t) const;

  bool operator==(const SignPath&) const = default;

 private:
  std::vector<int> signs_;
};

inline constexpr int kPathEnumerationGuard = 25;

// All 2^n sign paths in lexicographic order (-1 before +1, first sign most
// significant). Depths above kPathEnumerationGuard need allow_large.
class PathRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = SignPath;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = SignPath;
    iterator(std::uint64_t bits, int n) : bits_(bits), n_(n) {}
    SignPath operator*() const { return SignPath::from_bits(bits_, n_); }
    iterator& operator++() {
      ++bits_;
      return *this;
    }
    bool operator==(const iterator& o) const { return bits_ == o.bits_; }

   private:
    std::uint64_t bits_;
    int n_;
  };

  PathRange(int n, bool allow_large);
  iterator begin() const { return {0, n_}; }
  iterator end() const { return {std::uint64_t{1} << n_, n_}; }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }

 private:
  int n_;
};

PathRange all_paths(int n, bool allow_large = false);

// Complete binary tree of depth n stored level by level: level t (1-based)
// holds 2^(t-1) labels indexed by the packed signs eps_1..eps_{t-1}, so a
// label can only depend on the signs strictly before its level.
template <class Label>
class LabeledTree {
 public:
  LabeledTree() = default;

  explicit LabeledTree(std::vector<std::vector<Label>> levels)
      : levels_(std::move(levels)) {
    for (std::size_t t = 0; t < levels_.size(); ++t) {
      if (levels_[t].size() != (std::size_t{1} << t)) {
        throw ShapeError("tree: level " + std::to_string(t + 1) + " has " +
                         std::to_string(levels_[t].size()) +
                         " labels, expected " +
                         std::to_string(std::size_t{1} << t));
      }
    }
  }

  static LabeledTree constant(int depth, const Label& c) {
    check_depth(depth);
    std::vector<std::vector<Label>> lv;
    for (int t = 0; t < depth; ++t) lv.emplace_back(std::size_t{1} << t, c);
    return LabeledTree(std::move(lv));
  }

  // Builds level t from make(t, node_index).
  template <class Fn>
  static LabeledTree generate(int depth, Fn&& make) {
    check_depth(depth);
    std::vector<std::vector<Label>> lv(static_cast<std::size_t>(depth));
    for (int t = 1; t <= depth; ++t) {
      auto& level = lv[static_cast<std::size_t>(t - 1)];
      level.reserve(std::size_t{1} << (t - 1));
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << (t - 1)); ++i) {
        level.push_back(make(t, i));
      }
    }
    return LabeledTree(std::move(lv));
  }

  int depth() const { return static_cast<int>(levels_.size()); }

  const Label& node(int t, std::uint64_t index) const {
    if (t < 1 || t > depth()) {
      throw IndexError("tree: level " + std::to_string(t) +
                       " outside [1, " + std::to_string(depth()) + "]");
    }
    return levels_[static_cast<std::size_t>(t - 1)].at(index);
  }

  const Label& label_at(int t, const SignPath& path) const {
    if (t < 1 || t > depth()) {
      throw IndexError("tree: level " + std::to_string(t) +
                       " outside [1, " + std::to_string(depth()) + "]");
    }
    if (path.length() < t - 1) {
      throw ShapeError("tree: path shorter than t - 1");
    }
    return levels_[static_cast<std::size_t>(t - 1)][path.prefix_index(t)];
  }

  // Unchecked level access for path sweeps.
  const std::vector<Label>& level(int t) const {
    return levels_[static_cast<std::size_t>(t - 1)];
  }
  const std::vector<std::vector<Label>>& levels() const { return levels_; }

  bool operator==(const LabeledTree&) const = default;

 private:
  static void check_depth(int depth) {
    if (depth < 0 || depth > 30) {
      throw ResourceError("tree: depth " + std::to_string(depth) +
                          " outside the storable range [0, 30]");
    }
  }

  std::vector<std::vector<Label>> levels_;
};

using RealTree = LabeledTree<double>;
using CovariateTree = LabeledTree<CovariateId>;

// Node-wise image of a tree under fn.
template <class Label, class Fn>
auto map_tree(const LabeledTree<Label>& tree, Fn&& fn)
    -> LabeledTree<std::decay_t<decltype(fn(tree.node(1, 0)))>> {
  using Out = std::decay_t<decltype(fn(tree.node(1, 0)))>;
  std::vector<std::vector<Out>> lv;
  lv.reserve(tree.levels().size());
  for (const auto& level : tree.levels()) {
    std::vector<Out> out;
    out.reserve(level.size());
    for (const auto& label : level) out.push_back(fn(label));
    lv.push_back(std::move(out));
  }
  return LabeledTree<Out>(std::move(lv));
}

// The real-valued tree f(x_t(eps)).
RealTree compose(const CovariateTree& tree, const ComparatorFamily& family,
                 const PredictorHandle& predictor);

RealTree compose(const LabeledTree<Covariate>& tree,
                 const ComparatorFamily& family,
                 const PredictorHandle& predictor);

}  // namespace seqreg

#endif  // SEQREG_TREES_HPP_
