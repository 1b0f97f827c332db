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

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqreg/complexity.hpp"
#include "seqreg/errors.hpp"

namespace seqreg {
namespace {

constexpr double kDistanceSlack = 1e-12;

using Mask = std::vector<std::uint64_t>;

bool test_bit(const Mask& m, std::size_t i) { return (m[i / 64] >> (i % 64)) & 1u; }
void set_bit(Mask& m, std::size_t i) { m[i / 64] |= std::uint64_t{1} << (i % 64); }

std::size_t popcount(const Mask& m) {
  std::size_t c = 0;
  for (std::uint64_t w : m) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t overlap(const Mask& a, const Mask& b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  }
  return c;
}

bool is_subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] & ~b[i]) return false;
  }
  return true;
}

// Distinct values f(x_node) per node, nodes in heap order.
std::vector<std::vector<double>> node_values(const ComparatorFamily& family,
                                             const CovariateTree& x) {
  std::vector<std::vector<double>> vals;
  for (int t = 1; t <= x.depth(); ++t) {
    for (CovariateId id : x.level(t)) {
      std::vector<double> v;
      for (std::size_t f = 0; f < family.size(); ++f) {
        v.push_back(family.value(f, id));
      }
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      vals.push_back(std::move(v));
    }
  }
  return vals;
}

std::size_t heap_index(int t, std::uint64_t idx) {
  return (std::size_t{1} << (t - 1)) - 1 + static_cast<std::size_t>(idx);
}

// Exact minimum set cover by branch and bound.
class SetCoverSolver {
 public:
  SetCoverSolver(const std::vector<Mask>& sets, std::size_t universe)
      : sets_(sets), universe_(universe), covering_(universe) {
    for (std::size_t s = 0; s < sets_.size(); ++s) {
      for (std::size_t e = 0; e < universe_; ++e) {
        if (test_bit(sets_[s], e)) covering_[e].push_back(s);
      }
    }
    for (const Mask& m : sets_) max_size_ = std::max(max_size_, popcount(m));
  }

  std::vector<std::size_t> solve() {
    best_ = greedy();
    Mask uncovered((universe_ + 63) / 64, 0);
    for (std::size_t e = 0; e < universe_; ++e) set_bit(uncovered, e);
    std::vector<std::size_t> chosen;
    search(uncovered, chosen);
    return best_;
  }

 private:
  std::vector<std::size_t> greedy() const {
    Mask uncovered((universe_ + 63) / 64, 0);
    for (std::size_t e = 0; e < universe_; ++e) set_bit(uncovered, e);
    std::vector<std::size_t> chosen;
    while (popcount(uncovered) > 0) {
      std::size_t best = 0, gain = 0;
      for (std::size_t s = 0; s < sets_.size(); ++s) {
        const std::size_t g = overlap(sets_[s], uncovered);
        if (g > gain) {
          gain = g;
          best = s;
        }
      }
      if (gain == 0) throw NumericError("cover: universe cannot be covered");
      chosen.push_back(best);
      for (std::size_t i = 0; i < uncovered.size(); ++i) {
        uncovered[i] &= ~sets_[best][i];
      }
    }
    return chosen;
  }

  void search(const Mask& uncovered, std::vector<std::size_t>& chosen) {
    const std::size_t left = popcount(uncovered);
    if (left == 0) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    const std::size_t need = (left + max_size_ - 1) / max_size_;
    if (chosen.size() + need >= best_.size()) return;
    // Branch on the uncovered element with the fewest covering sets.
    std::size_t pivot = universe_;
    for (std::size_t e = 0; e < universe_; ++e) {
      if (test_bit(uncovered, e) &&
          (pivot == universe_ || covering_[e].size() < covering_[pivot].size())) {
        pivot = e;
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> options;
    for (std::size_t s : covering_[pivot]) {
      options.emplace_back(overlap(sets_[s], uncovered), s);
    }
    std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [gain, s] : options) {
      Mask next = uncovered;
      for (std::size_t i = 0; i < next.size(); ++i) next[i] &= ~sets_[s][i];
      chosen.push_back(s);
      search(next, chosen);
      chosen.pop_back();
      if (chosen.size() + need >= best_.size()) return;
    }
  }

  const std::vector<Mask>& sets_;
  std::size_t universe_;
  std::vector<std::vector<std::size_t>> covering_;
  std::size_t max_size_ = 1;
  std::vector<std::size_t> best_;
};

// beta >= 0; beta == 0 asks for exact reproduction up to round-off.
CoverReport solve_cover(const ComparatorFamily& family, const CovariateTree& x,
                        double beta, CoverNorm norm) {
  if (!family.is_finite()) {
    throw CapabilityError("seq_cover_number: requires a finite-table family");
  }
  for (const auto& level : x.levels()) {
    for (CovariateId id : level) {
      if (id >= family.num_covariates()) {
        throw LookupError("seq_cover_number: unknown covariate in tree");
      }
    }
  }
  const int n = x.depth();
  const std::size_t nf = family.size();
  CoverReport report;
  report.beta = beta;
  report.norm = norm;
  if (n == 0) {
    report.size = 1;
    report.cover.emplace_back();
    report.certificate.assign(nf, std::vector<std::size_t>(1, 0));
    report.candidates = 1;
    return report;
  }
  const auto vals = node_values(family, x);
  double count = 1.0;
  for (const auto& v : vals) count *= static_cast<double>(v.size());
  if (count > kCoverCandidateGuard) {
    throw ResourceError("seq_cover_number: " + std::to_string(count) +
                        " candidate selector trees exceed the guard " +
                        std::to_string(kCoverCandidateGuard));
  }
  const std::size_t paths = std::size_t{1} << n;
  const std::size_t universe = nf * paths;
  const std::size_t words = (universe + 63) / 64;
  const double thresh = norm == CoverNorm::kLinf
                            ? beta + kDistanceSlack
                            : static_cast<double>(n) * beta * beta +
                                  kDistanceSlack;

  // f's value at every node, heap order.
  std::vector<std::vector<double>> fval(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    for (int t = 1; t <= n; ++t) {
      for (CovariateId id : x.level(t)) fval[f].push_back(family.value(f, id));
    }
  }

  std::map<Mask, std::vector<std::size_t>> unique;  // mask -> choice digits
  std::vector<std::size_t> digit(vals.size(), 0);
  const auto total = static_cast<std::uint64_t>(count);
  for (std::uint64_t c = 0; c < total; ++c) {
    Mask m(words, 0);
    for (std::size_t p = 0; p < paths; ++p) {
      for (std::size_t f = 0; f < nf; ++f) {
        double acc = 0.0;
        for (int t = 1; t <= n; ++t) {
          const std::size_t node = heap_index(t, p >> (n - t + 1));
          const double d = std::abs(fval[f][node] - vals[node][digit[node]]);
          acc = norm == CoverNorm::kLinf ? std::max(acc, d) : acc + d * d;
        }
        if (acc <= thresh) set_bit(m, f * paths + p);
      }
    }
    unique.emplace(std::move(m), digit);
    for (std::size_t k = 0; k < digit.size(); ++k) {
      if (++digit[k] < vals[k].size()) break;
      digit[k] = 0;
    }
  }
  report.candidates = total;

  std::vector<Mask> masks;
  std::vector<std::vector<std::size_t>> choices;
  for (auto& [m, d] : unique) {
    masks.push_back(m);
    choices.push_back(d);
  }
  // Drop candidates dominated by another candidate.
  if (masks.size() <= 4000) {
    std::vector<std::size_t> order(masks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return popcount(masks[a]) > popcount(masks[b]);
    });
    std::vector<Mask> kept;
    std::vector<std::vector<std::size_t>> kept_choices;
    for (std::size_t i : order) {
      bool dominated = false;
      for (const Mask& k : kept) {
        if (is_subset(masks[i], k)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) {
        kept.push_back(masks[i]);
        kept_choices.push_back(choices[i]);
      }
    }
    masks = std::move(kept);
    choices = std::move(kept_choices);
  }

  SetCoverSolver solver(masks, universe);
  const std::vector<std::size_t> picked = solver.solve();
  report.size = picked.size();
  for (std::size_t s : picked) {
    const auto& d = choices[s];
    report.cover.push_back(RealTree::generate(n, [&](int t, std::uint64_t i) {
      const std::size_t node = heap_index(t, i);
      return vals[node][d[node]];
    }));
  }
  report.certificate.assign(nf, std::vector<std::size_t>(paths, 0));
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t p = 0; p < paths; ++p) {
      for (std::size_t k = 0; k < picked.size(); ++k) {
        if (test_bit(masks[picked[k]], f * paths + p)) {
          report.certificate[f][p] = k;
          break;
        }
      }
    }
  }
  return report;
}

// Memoized search for shattered trees over predictor subsets.
class ShatterSearch {
 public:
  ShatterSearch(const ComparatorFamily& family,
                std::span<const CovariateId> covariates, double beta,
                std::span<const double> extra)
      : family_(family), covariates_(covariates.begin(), covariates.end()),
        beta_(beta), extra_(extra.begin(), extra.end()) {}

  struct Choice {
    std::size_t covariate = 0;
    double witness = 0.0;
    std::uint64_t minus = 0;
    std::uint64_t plus = 0;
  };

  bool shatters(std::uint64_t mask, int depth) {
    if (mask == 0) return false;
    if (depth == 0) return true;
    const std::uint64_t key = mask | (static_cast<std::uint64_t>(depth) << 32);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool ok = false;
    for (std::size_t xi = 0; xi < covariates_.size() && !ok; ++xi) {
      const CovariateId x = covariates_[xi];
      std::vector<double> vals;
      for (std::size_t f = 0; f < family_.size(); ++f) {
        if ((mask >> f) & 1u) vals.push_back(family_.value(f, x));
      }
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      std::vector<double> witnesses = extra_;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
          if (vals[j] - vals[i] >= beta_ - kDistanceSlack) {
            witnesses.push_back(0.5 * (vals[i] + vals[j]));
          }
        }
      }
      for (double s : witnesses) {
        std::uint64_t plus = 0, minus = 0;
        for (std::size_t f = 0; f < family_.size(); ++f) {
          if (!((mask >> f) & 1u)) continue;
          const double v = family_.value(f, x);
          if (v - s >= 0.5 * beta_ - kDistanceSlack) plus |= std::uint64_t{1} << f;
          if (s - v >= 0.5 * beta_ - kDistanceSlack) minus |= std::uint64_t{1} << f;
        }
        if (plus != 0 && minus != 0 && shatters(minus, depth - 1) &&
            shatters(plus, depth - 1)) {
          choice_[key] = {xi, s, minus, plus};
          ok = true;
          break;
        }
      }
    }
    memo_[key] = ok;
    return ok;
  }

  ShatterCertificate certificate(std::uint64_t mask, int depth) const {
    std::vector<std::vector<CovariateId>> xs(static_cast<std::size_t>(depth));
    std::vector<std::vector<double>> ws(static_cast<std::size_t>(depth));
    for (int t = 0; t < depth; ++t) {
      xs[static_cast<std::size_t>(t)].resize(std::size_t{1} << t);
      ws[static_cast<std::size_t>(t)].resize(std::size_t{1} << t);
    }
    std::vector<std::size_t> selectors(std::size_t{1} << depth, 0);
    auto fill = [&](auto&& self, std::uint64_t m, int t, std::uint64_t idx) {
      if (t > depth) {
        selectors[idx] = static_cast<std::size_t>(std::countr_zero(m));
        return;
      }
      const int remaining = depth - t + 1;
      const Choice& c =
          choice_.at(m | (static_cast<std::uint64_t>(remaining) << 32));
      xs[static_cast<std::size_t>(t - 1)][idx] = covariates_[c.covariate];
      ws[static_cast<std::size_t>(t - 1)][idx] = c.witness;
      self(self, c.minus, t + 1, 2 * idx);
      self(self, c.plus, t + 1, 2 * idx + 1);
    };
    fill(fill, mask, 1, 0);
    ShatterCertificate cert;
    cert.depth = depth;
    cert.covariate_tree = CovariateTree(std::move(xs));
    cert.witness = RealTree(std::move(ws));
    cert.selectors = std::move(selectors);
    return cert;
  }

 private:
  const ComparatorFamily& family_;
  std::vector<CovariateId> covariates_;
  double beta_;
  std::vector<double> extra_;
  std::unordered_map<std::uint64_t, bool> memo_;
  std::unordered_map<std::uint64_t, Choice> choice_;
};

}  // namespace

CoverReport seq_cover_number(const ComparatorFamily& family,
                             const CovariateTree& x, double beta,
                             CoverNorm norm) {
  if (!(beta > 0)) throw DomainError("seq_cover_number: beta must be > 0");
  return solve_cover(family, x, beta, norm);
}

bool verify_cover(const ComparatorFamily& family, const CovariateTree& x,
                  const CoverReport& report) {
  const int n = x.depth();
  if (report.certificate.size() != family.size()) return false;
  const std::size_t paths = std::size_t{1} << n;
  for (std::size_t f = 0; f < family.size(); ++f) {
    if (report.certificate[f].size() != paths) return false;
    for (std::size_t p = 0; p < paths; ++p) {
      const std::size_t k = report.certificate[f][p];
      if (k >= report.cover.size()) return false;
      const RealTree& v = report.cover[k];
      if (v.depth() != n) return false;
      double acc = 0.0;
      for (int t = 1; t <= n; ++t) {
        const std::uint64_t idx = p >> (n - t + 1);
        const double d = std::abs(family.value(f, x.level(t)[idx]) -
                                  v.level(t)[idx]);
        acc = report.norm == CoverNorm::kLinf ? std::max(acc, d) : acc + d * d;
      }
      const double limit = report.norm == CoverNorm::kLinf
                               ? report.beta
                               : n * report.beta * report.beta;
      if (acc > limit + kDistanceSlack) return false;
    }
  }
  return true;
}

FatShatteringResult fat_shattering(const ComparatorFamily& family,
                                   std::span<const CovariateId> covariates,
                                   double beta, int max_depth,
                                   std::span<const double> extra_witnesses) {
  if (!family.is_finite()) {
    throw CapabilityError("fat_shattering: requires a finite-table family");
  }
  if (!(beta > 0)) throw DomainError("fat_shattering: beta must be > 0");
  if (max_depth < 0) throw DomainError("fat_shattering: negative max depth");
  if (family.size() > 24) {
    throw ResourceError("fat_shattering: subset search over " +
                        std::to_string(family.size()) +
                        " predictors exceeds the guard of 24");
  }
  if (max_depth > 20) {
    throw ResourceError("fat_shattering: max depth above 20");
  }
  for (CovariateId id : covariates) {
    if (id >= family.num_covariates()) {
      throw LookupError("fat_shattering: unknown covariate");
    }
  }
  ShatterSearch search(family, covariates, beta, extra_witnesses);
  const std::uint64_t all = (std::uint64_t{1} << family.size()) - 1;
  int d = 0;
  while (d < max_depth && search.shatters(all, d + 1)) ++d;
  FatShatteringResult result;
  result.dimension = d;
  if (d > 0) result.certificate = search.certificate(all, d);
  return result;
}

bool verify_shatter_certificate(const ComparatorFamily& family,
                                const ShatterCertificate& c, double beta) {
  const int d = c.depth;
  if (c.covariate_tree.depth() != d || c.witness.depth() != d ||
      c.selectors.size() != (std::size_t{1} << d)) {
    return false;
  }
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << d); ++p) {
    const std::size_t f = c.selectors[p];
    if (f >= family.size()) return false;
    for (int t = 1; t <= d; ++t) {
      const std::uint64_t idx = p >> (d - t + 1);
      const int e = ((p >> (d - t)) & 1u) ? 1 : -1;
      const CovariateId x = c.covariate_tree.level(t)[idx];
      if (x >= family.num_covariates()) return false;
      const double margin = e * (family.value(f, x) - c.witness.level(t)[idx]);
      if (margin < 0.5 * beta - kDistanceSlack) return false;
    }
  }
  return true;
}

double cover_fat_bound(double beta, int n, int fat) {
  if (!(beta > 0)) throw DomainError("cover_fat_bound: beta must be > 0");
  if (n < 1) throw DomainError("cover_fat_bound: n must be >= 1");
  if (fat < 0) throw DomainError("cover_fat_bound: negative dimension");
  if (fat == 0) return 1.0;
  return std::pow(2.0 * std::numbers::e * n / beta, fat);
}

EntropyProfile cover_entropy(const ComparatorFamily& family,
                             const CovariateTree& x, CoverNorm norm) {
  const int n = x.depth();
  if (n == 0) return EntropyProfile({0.0}, {0.0});
  if (!family.is_finite()) {
    throw CapabilityError("cover_entropy: requires a finite-table family");
  }
  const auto vals = node_values(family, x);
  // Distances at which the coverage relation can change.
  std::vector<double> dist;
  const std::size_t paths = std::size_t{1} << n;
  std::uint64_t work = 0;
  for (std::size_t f = 0; f < family.size(); ++f) {
    for (std::size_t p = 0; p < paths; ++p) {
      // Per-node distance options along the path.
      std::vector<std::vector<double>> opts;
      for (int t = 1; t <= n; ++t) {
        const std::uint64_t idx = p >> (n - t + 1);
        const std::size_t node = heap_index(t, idx);
        const double fv = family.value(f, x.level(t)[idx]);
        std::vector<double> o;
        for (double v : vals[node]) o.push_back(std::abs(fv - v));
        opts.push_back(std::move(o));
      }
      if (norm == CoverNorm::kLinf) {
        for (const auto& o : opts) dist.insert(dist.end(), o.begin(), o.end());
        continue;
      }
      std::vector<double> partial{0.0};
      for (const auto& o : opts) {
        std::vector<double> next;
        for (double a : partial) {
          for (double d : o) next.push_back(a + d * d);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        partial = std::move(next);
        work += partial.size();
        if (work > 10'000'000) {
          throw ResourceError("cover_entropy: too many distinct distances");
        }
      }
      for (double a : partial) dist.push_back(std::sqrt(a / n));
    }
  }
  std::sort(dist.begin(), dist.end());
  std::vector<double> scales{0.0};
  for (double d : dist) {
    if (d > scales.back() * (1 + 1e-12) + 1e-12) scales.push_back(d);
  }
  std::vector<double> log_sizes;
  std::size_t last = 0;
  for (double s : scales) {
    if (last == 1) {
      log_sizes.push_back(0.0);
      continue;
    }
    last = solve_cover(family, x, s, norm).size;
    log_sizes.push_back(std::log(static_cast<double>(last)));
  }
  // Merge equal consecutive pieces.
  std::vector<double> ms{scales[0]}, ml{log_sizes[0]};
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (log_sizes[i] != ml.back()) {
      ms.push_back(scales[i]);
      ml.push_back(log_sizes[i]);
    }
  }
  return EntropyProfile(std::move(ms), std::move(ml));
}

}  // namespace seqreg
