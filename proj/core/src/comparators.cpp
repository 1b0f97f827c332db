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

#include "seqreg/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "x" + std::to_string(i);
  return ids;
}

CovariateId require_id(const Covariate& x, std::size_t count) {
  const auto* id = std::get_if<CovariateId>(&x);
  if (id == nullptr) {
    throw LookupError("covariate: expected a finite-set identifier");
  }
  if (*id >= count) {
    throw LookupError("covariate: identifier " + std::to_string(*id) +
                      " outside a set of size " + std::to_string(count));
  }
  return *id;
}

// Minimizes a convex function of simplex weights over a fixed support by
// pairwise mass exchange; each exchange is a golden-section line search.
double minimize_on_simplex(
    const std::function<double(const std::vector<double>&)>& objective,
    std::size_t k) {
  std::vector<double> w(k, 1.0 / static_cast<double>(k));
  double best = objective(w);
  if (k == 1) return best;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = best;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double total = w[i] + w[j];
        auto line = [&](double a) {
          std::vector<double> v = w;
          v[i] = a;
          v[j] = total - a;
          return objective(v);
        };
        // Coarse scan first so kinks of nonsmooth losses do not trap the
        // bracket, then golden refinement around the best cell.
        constexpr int kScan = 32;
        int arg = 0;
        double val = kInfinity;
        for (int s = 0; s <= kScan; ++s) {
          const double f = line(total * s / kScan);
          if (f < val) {
            val = f;
            arg = s;
          }
        }
        const double lo = total * std::max(0, arg - 1) / kScan;
        const double hi = total * std::min(kScan, arg + 1) / kScan;
        Minimum m = golden_section(line, lo, hi, 1e-10);
        if (m.value < best) {
          best = m.value;
          w[i] = m.argmin;
          w[j] = total - m.argmin;
        }
      }
    }
    if (before - best <= 1e-12 * std::max(1.0, std::abs(best))) break;
  }
  return best;
}

}  // namespace

std::uint64_t binomial(std::uint64_t m, std::uint64_t s) {
  if (s > m) return 0;
  s = std::min(s, m - s);
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= s; ++i) {
    const std::uint64_t num = m - s + i;
    if (acc > UINT64_MAX / num) return UINT64_MAX;
    acc = acc * num / i;  // exact: acc * num is C(num, i) * i
  }
  return acc;
}

ComparatorFamily ComparatorFamily::finite_table(
    Eigen::MatrixXd values, std::vector<std::string> covariate_ids,
    std::optional<Interval> output_range) {
  if (values.rows() == 0 || values.cols() == 0) {
    throw ShapeError("finite_table: table must be nonempty");
  }
  if (!values.allFinite()) {
    throw DomainError("finite_table: values must be finite");
  }
  if (covariate_ids.empty()) {
    covariate_ids = default_ids(static_cast<std::size_t>(values.cols()));
  }
  if (covariate_ids.size() != static_cast<std::size_t>(values.cols())) {
    throw ShapeError("finite_table: " + std::to_string(covariate_ids.size()) +
                     " covariate ids for " + std::to_string(values.cols()) +
                     " columns");
  }
  ComparatorFamily f;
  f.kind_ = FamilyKind::kFiniteTable;
  const Interval hull{values.minCoeff(), values.maxCoeff()};
  if (output_range) {
    if (!output_range->contains(hull.lo) || !output_range->contains(hull.hi)) {
      throw DomainError("finite_table: values leave the output range");
    }
    f.output_range_ = *output_range;
  } else {
    f.output_range_ = hull;
  }
  f.values_ = std::move(values);
  f.ids_ = std::move(covariate_ids);
  return f;
}

ComparatorFamily ComparatorFamily::constants(std::span<const double> levels,
                                             std::size_t num_covariates) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(levels.size()),
                    static_cast<Eigen::Index>(num_covariates));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    v.row(static_cast<Eigen::Index>(i)).setConstant(levels[i]);
  }
  return finite_table(std::move(v));
}

ComparatorFamily ComparatorFamily::linear(int dimension,
                                          double weight_norm_bound) {
  if (dimension < 1) throw DomainError("linear: dimension must be >= 1");
  if (!(weight_norm_bound > 0)) {
    throw DomainError("linear: weight norm bound must be positive");
  }
  ComparatorFamily f;
  f.kind_ = FamilyKind::kLinear;
  f.dimension_ = dimension;
  f.weight_norm_bound_ = weight_norm_bound;
  f.output_range_ = {-kInfinity, kInfinity};
  return f;
}

ComparatorFamily ComparatorFamily::sparse_convex(
    Eigen::MatrixXd base, int sparsity,
    std::vector<std::string> covariate_ids) {
  if (base.rows() == 0 || base.cols() == 0) {
    throw ShapeError("sparse_convex: base table must be nonempty");
  }
  if (sparsity < 1 || sparsity > base.rows()) {
    throw DomainError("sparse_convex: sparsity must be in [1, M]");
  }
  if (!base.allFinite() || base.cwiseAbs().maxCoeff() > 1.0) {
    throw DomainError("sparse_convex: base values must lie in [-1, 1]");
  }
  if (covariate_ids.empty()) {
    covariate_ids = default_ids(static_cast<std::size_t>(base.cols()));
  }
  if (covariate_ids.size() != static_cast<std::size_t>(base.cols())) {
    throw ShapeError("sparse_convex: covariate id count mismatch");
  }
  ComparatorFamily f;
  f.kind_ = FamilyKind::kSparseConvex;
  f.values_ = std::move(base);
  f.ids_ = std::move(covariate_ids);
  f.sparsity_ = sparsity;
  f.output_range_ = {-1.0, 1.0};
  return f;
}

std::size_t ComparatorFamily::size() const {
  return static_cast<std::size_t>(values_.rows());
}

std::size_t ComparatorFamily::num_covariates() const {
  return static_cast<std::size_t>(values_.cols());
}

std::optional<CovariateId> ComparatorFamily::find_covariate(
    std::string_view id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

void ComparatorFamily::check_covariate(const Covariate& x) const {
  if (kind_ == FamilyKind::kLinear) {
    const auto* v = std::get_if<Eigen::VectorXd>(&x);
    if (v == nullptr || v->size() != dimension_) {
      throw LookupError("covariate: expected a vector of dimension " +
                        std::to_string(dimension_));
    }
    return;
  }
  require_id(x, num_covariates());
}

double ComparatorFamily::evaluate(const PredictorHandle& predictor,
                                  const Covariate& x) const {
  switch (kind_) {
    case FamilyKind::kFiniteTable: {
      const auto* f = std::get_if<std::size_t>(&predictor);
      if (f == nullptr || *f >= size()) {
        throw LookupError("finite_table: invalid predictor handle");
      }
      return values_(static_cast<Eigen::Index>(*f),
                     static_cast<Eigen::Index>(require_id(x, num_covariates())));
    }
    case FamilyKind::kLinear: {
      const auto* w = std::get_if<Eigen::VectorXd>(&predictor);
      if (w == nullptr || w->size() != dimension_) {
        throw LookupError("linear: predictor must be a weight vector of "
                          "dimension " + std::to_string(dimension_));
      }
      if (w->norm() > weight_norm_bound_ * (1 + 1e-12)) {
        throw LookupError("linear: weight vector exceeds the norm bound");
      }
      check_covariate(x);
      return w->dot(std::get<Eigen::VectorXd>(x));
    }
    case FamilyKind::kSparseConvex: {
      const auto* sw = std::get_if<SparseWeights>(&predictor);
      if (sw == nullptr || sw->support.size() != sw->weights.size()) {
        throw LookupError("sparse_convex: predictor must be (support, "
                          "weights) of equal length");
      }
      if (sw->support.size() > static_cast<std::size_t>(sparsity_)) {
        throw LookupError("sparse_convex: support larger than sparsity");
      }
      double total = 0.0;
      for (std::size_t i = 0; i < sw->support.size(); ++i) {
        if (sw->support[i] >= size()) {
          throw LookupError("sparse_convex: base index out of range");
        }
        for (std::size_t j = 0; j < i; ++j) {
          if (sw->support[j] == sw->support[i]) {
            throw LookupError("sparse_convex: repeated base index");
          }
        }
        if (!(sw->weights[i] >= 0)) {
          throw LookupError("sparse_convex: negative weight");
        }
        total += sw->weights[i];
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw LookupError("sparse_convex: weights must sum to 1");
      }
      const auto col = static_cast<Eigen::Index>(require_id(x, num_covariates()));
      double v = 0.0;
      for (std::size_t i = 0; i < sw->support.size(); ++i) {
        v += sw->weights[i] *
             values_(static_cast<Eigen::Index>(sw->support[i]), col);
      }
      return v;
    }
  }
  return 0.0;
}

Eigen::VectorXd ridge_solution(std::span<const Observation> history,
                               int dimension, double ridge) {
  Eigen::MatrixXd A = ridge * Eigen::MatrixXd::Identity(dimension, dimension);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dimension);
  for (const Observation& o : history) {
    const auto* x = std::get_if<Eigen::VectorXd>(&o.x);
    if (x == nullptr || x->size() != dimension) {
      throw LookupError("ridge: covariate dimension mismatch");
    }
    A.selfadjointView<Eigen::Lower>().rankUpdate(*x);
    b += o.y * *x;
  }
  A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
  if (ridge > 0) return A.llt().solve(b);
  return A.completeOrthogonalDecomposition().solve(b);
}

double cumulative_loss(const ComparatorFamily& family, const LossModel& model,
                       const PredictorHandle& predictor,
                       std::span<const Observation> history) {
  double total = 0.0;
  for (const Observation& o : history) {
    total += loss_value(model, family.evaluate(predictor, o.x), o.y);
  }
  return total;
}

double best_comparator_loss(const ComparatorFamily& family,
                            const LossModel& model,
                            std::span<const Observation> history,
                            double ridge) {
  if (history.empty()) {
    throw DomainError("best_comparator_loss: history must be nonempty");
  }
  if (!(ridge >= 0)) throw DomainError("best_comparator_loss: ridge < 0");
  switch (family.kind()) {
    case FamilyKind::kFiniteTable: {
      std::vector<CovariateId> xs;
      xs.reserve(history.size());
      for (const Observation& o : history) {
        xs.push_back(require_id(o.x, family.num_covariates()));
        model.check_arguments(model.prediction_range().lo, o.y);
      }
      double best = kInfinity;
      for (std::size_t f = 0; f < family.size(); ++f) {
        double total = 0.0;
        for (std::size_t t = 0; t < history.size(); ++t) {
          const double v = family.value(f, xs[t]);
          model.check_arguments(v, history[t].y);
          total += model.value_unchecked(v, history[t].y);
        }
        best = std::min(best, total);
      }
      return best;
    }
    case FamilyKind::kLinear: {
      if (model.kind() != LossKind::kSquare) {
        throw CapabilityError("best_comparator_loss: the linear family is "
                              "supported only with square loss");
      }
      const int d = family.dimension();
      Eigen::MatrixXd A = ridge * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
      double yy = 0.0;
      for (const Observation& o : history) {
        family.check_covariate(o.x);
        const auto& x = std::get<Eigen::VectorXd>(o.x);
        A.noalias() += x * x.transpose();
        b += o.y * x;
        yy += o.y * o.y;
      }
      const Eigen::VectorXd w =
          ridge > 0 ? Eigen::VectorXd(A.llt().solve(b))
                    : Eigen::VectorXd(A.completeOrthogonalDecomposition().solve(b));
      if (w.norm() > family.weight_norm_bound() * (1 + 1e-12)) {
        throw CapabilityError("best_comparator_loss: the ridge optimum "
                              "violates the weight norm bound");
      }
      // sum y^2 - b' A^{-1} b, clamped against round-off.
      return std::max(0.0, yy - b.dot(w));
    }
    case FamilyKind::kSparseConvex: {
      const std::size_t M = family.size();
      const auto s = static_cast<std::size_t>(family.sparsity());
      const std::uint64_t supports = binomial(M, s);
      if (supports > kSupportEnumerationGuard) {
        throw ResourceError("best_comparator_loss: " +
                            std::to_string(supports) +
                            " supports exceed the enumeration guard");
      }
      std::vector<CovariateId> xs;
      for (const Observation& o : history) {
        xs.push_back(require_id(o.x, family.num_covariates()));
      }
      std::vector<std::size_t> support(s);
      std::iota(support.begin(), support.end(), 0);
      double best = kInfinity;
      while (true) {
        auto objective = [&](const std::vector<double>& w) {
          double total = 0.0;
          for (std::size_t t = 0; t < xs.size(); ++t) {
            double v = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
              v += w[j] * family.value(support[j], xs[t]);
            }
            total += loss_value(model, v, history[t].y);
          }
          return total;
        };
        best = std::min(best, minimize_on_simplex(objective, s));
        // Next combination in lexicographic order.
        std::size_t i = s;
        while (i > 0 && support[i - 1] == M - s + i - 1) --i;
        if (i == 0) break;
        ++support[i - 1];
        for (std::size_t j = i; j < s; ++j) support[j] = support[j - 1] + 1;
      }
      return best;
    }
  }
  return kInfinity;
}

}  // namespace seqreg
