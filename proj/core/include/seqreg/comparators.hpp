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

#ifndef SEQREG_COMPARATORS_HPP_
#define SEQREG_COMPARATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "seqreg/losses.hpp"

namespace seqreg {

// Index into the finite covariate set of a table-backed family.
using CovariateId = std::size_t;

// Either an element of a finite covariate set or a point of R^d.
using Covariate = std::variant<CovariateId, Eigen::VectorXd>;

// Convex combination of base functions.
struct SparseWeights {
  std::vector<std::size_t> support;
  std::vector<double> weights;
};

// Row index (finite table), weight vector (linear) or SparseWeights.
using PredictorHandle = std::variant<std::size_t, Eigen::VectorXd, SparseWeights>;

struct Observation {
  Covariate x;
  double y = 0.0;
};

using History = std::vector<Observation>;

enum class FamilyKind { kFiniteTable, kLinear, kSparseConvex };

class ComparatorFamily {
 public:
  // values(f, x) is the prediction of predictor f on covariate x. The output
  // range defaults to the hull of the table.
  static ComparatorFamily finite_table(
      Eigen::MatrixXd values, std::vector<std::string> covariate_ids = {},
      std::optional<Interval> output_range = {});

  // Constant predictors over num_covariates covariates.
  static ComparatorFamily constants(std::span<const double> levels,
                                    std::size_t num_covariates = 1);

  static ComparatorFamily linear(int dimension,
                                 double weight_norm_bound = kNoBound);

  // base(j, x) in [-1, 1]; members mix at most `sparsity` rows.
  static ComparatorFamily sparse_convex(
      Eigen::MatrixXd base, int sparsity,
      std::vector<std::string> covariate_ids = {});

  static constexpr double kNoBound = std::numeric_limits<double>::infinity();

  FamilyKind kind() const { return kind_; }
  bool is_finite() const { return kind_ == FamilyKind::kFiniteTable; }

  // Number of predictors (finite table) or base functions (sparse).
  std::size_t size() const;
  std::size_t num_covariates() const;
  int dimension() const { return dimension_; }
  double weight_norm_bound() const { return weight_norm_bound_; }
  int sparsity() const { return sparsity_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& covariate_ids() const { return ids_; }
  const Interval& output_range() const { return output_range_; }

  std::optional<CovariateId> find_covariate(std::string_view id) const;

  // Table lookup without validation; the hot path of every search.
  double value(std::size_t f, CovariateId x) const { return values_(f, x); }

  // Throws LookupError for handles or covariates foreign to the family.
  double evaluate(const PredictorHandle& predictor, const Covariate& x) const;

  // Throws LookupError if x is not a covariate of this family.
  void check_covariate(const Covariate& x) const;

 private:
  ComparatorFamily() = default;

  FamilyKind kind_ = FamilyKind::kFiniteTable;
  Eigen::MatrixXd values_;
  std::vector<std::string> ids_;
  Interval output_range_;
  int dimension_ = 0;
  double weight_norm_bound_ = kNoBound;
  int sparsity_ = 0;
};

// Infimum over the family of the cumulative loss on the history. For the
// linear family under square loss the objective carries the ridge penalty
// ridge * |w|^2 and the value is the closed-form ridge optimum. Other
// (family, loss) pairs for the linear family throw CapabilityError.
double best_comparator_loss(const ComparatorFamily& family,
                            const LossModel& model,
                            std::span<const Observation> history,
                            double ridge = 0.0);

// Ridge minimizer argmin_w sum (w'x - y)^2 + ridge |w|^2.
Eigen::VectorXd ridge_solution(std::span<const Observation> history,
                               int dimension, double ridge);

// Cumulative loss of one member.
double cumulative_loss(const ComparatorFamily& family, const LossModel& model,
                       const PredictorHandle& predictor,
                       std::span<const Observation> history);

// Number of size-s supports among m base functions, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t m, std::uint64_t s);

inline constexpr std::uint64_t kSupportEnumerationGuard = 1'000'000;

}  // namespace seqreg

#endif  // SEQREG_COMPARATORS_HPP_
