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

#include "seqreg/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

constexpr double kForecastTolerance = 1e-13;

CovariateId as_id(const Covariate& x) {
  if (const auto* id = std::get_if<CovariateId>(&x)) return *id;
  throw ShapeError("expected a covariate index, got a vector");
}

const Eigen::VectorXd& as_vector(const Covariate& x, int d) {
  const auto* v = std::get_if<Eigen::VectorXd>(&x);
  if (v == nullptr) throw ShapeError("expected a covariate vector, got an index");
  if (v->size() != d) {
    throw ShapeError("covariate dimension " + std::to_string(v->size()) +
                     " does not match " + std::to_string(d));
  }
  return *v;
}

double resolve_temperature(double B, double temperature) {
  return temperature > 0.0 ? temperature : B * B;
}

// Cumulative square losses of every row of a finite family.
std::vector<double> expert_losses(const ComparatorFamily& family,
                                  std::span<const Observation> history) {
  if (!family.is_finite()) {
    throw CapabilityError("experts: the family must be a finite table");
  }
  if (family.size() == 0) throw DomainError("experts: empty family");
  std::vector<double> L(family.size(), 0.0);
  for (const Observation& o : history) {
    const CovariateId x = as_id(o.x);
    family.check_covariate(x);
    for (std::size_t f = 0; f < L.size(); ++f) {
      const double r = family.value(f, x) - o.y;
      L[f] += r * r;
    }
  }
  return L;
}

bool is_symmetric_pair(std::span<const double> grid, double B) {
  if (grid.size() != 2) return false;
  const double lo = std::min(grid[0], grid[1]);
  const double hi = std::max(grid[0], grid[1]);
  return std::abs(lo + B) <= 1e-12 && std::abs(hi - B) <= 1e-12;
}

}  // namespace

double experts_relaxation(const ComparatorFamily& family, double B,
                          std::span<const Observation> history,
                          double temperature) {
  const double tau = resolve_temperature(B, temperature);
  std::vector<double> a = expert_losses(family, history);
  for (double& v : a) v = -v / tau;
  return tau * log_sum_exp(a);
}

double experts_forecast(const ComparatorFamily& family, double B,
                        std::span<const Observation> history,
                        const Covariate& x, double temperature) {
  const double tau = resolve_temperature(B, temperature);
  const std::vector<double> L = expert_losses(family, history);
  const CovariateId id = as_id(x);
  family.check_covariate(id);
  std::vector<double> up(L.size()), down(L.size());
  for (std::size_t f = 0; f < L.size(); ++f) {
    const double v = family.value(f, id);
    up[f] = -(L[f] + (v - B) * (v - B)) / tau;
    down[f] = -(L[f] + (v + B) * (v + B)) / tau;
  }
  return clip(tau / (4.0 * B) * (log_sum_exp(up) - log_sum_exp(down)), B);
}

double vaw_forecast(std::span<const Observation> history,
                    const Eigen::VectorXd& x, double lambda, double B) {
  if (!(lambda > 0.0)) throw DomainError("vaw: lambda must be positive");
  const int d = static_cast<int>(x.size());
  if (d < 1) throw ShapeError("vaw: empty covariate");
  Eigen::MatrixXd A = lambda * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (const Observation& o : history) {
    const Eigen::VectorXd& z = as_vector(o.x, d);
    A.selfadjointView<Eigen::Lower>().rankUpdate(z);
    b += o.y * z;
  }
  A.selfadjointView<Eigen::Lower>().rankUpdate(x);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("vaw: Gram matrix is not positive definite");
  }
  return clip(x.dot(llt.solve(b)), B);
}

double vaw_relaxation(std::span<const Observation> history, double lambda,
                      double B, int n, int d) {
  if (!(lambda > 0.0)) throw DomainError("vaw: lambda must be positive");
  if (n < 1 || d < 1) throw DomainError("vaw: n and d must be positive");
  Eigen::MatrixXd A = lambda * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  double yy = 0.0;
  for (const Observation& o : history) {
    const Eigen::VectorXd& z = as_vector(o.x, d);
    A.selfadjointView<Eigen::Lower>().rankUpdate(z);
    b += o.y * z;
    yy += o.y * o.y;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("vaw: Gram matrix is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  const Eigen::VectorXd w = llt.matrixL().solve(b);
  const double log_ratio =
      d * std::log(static_cast<double>(n) / d) - log_det;
  return w.squaredNorm() + 4.0 * B * B * log_ratio - yy;
}

RelaxationOracle experts_oracle(const ComparatorFamily& family, double B,
                                int n, double temperature) {
  const double tau = resolve_temperature(B, temperature);
  RelaxationOracle rel;
  rel.name = "experts";
  rel.horizon = n;
  rel.evaluate = [family, B, tau](std::span<const Observation> h) {
    return experts_relaxation(family, B, h, tau);
  };
  rel.comparator_loss = [family](std::span<const Observation> h) {
    const std::vector<double> L = expert_losses(family, h);
    return *std::min_element(L.begin(), L.end());
  };
  rel.parameters = {{"B", B},
                    {"temperature", tau},
                    {"family_size", static_cast<double>(family.size())}};
  return rel;
}

RelaxationOracle vaw_oracle(int d, double lambda, double B, int n) {
  RelaxationOracle rel;
  rel.name = "vaw";
  rel.horizon = n;
  rel.evaluate = [=](std::span<const Observation> h) {
    return vaw_relaxation(h, lambda, B, n, d);
  };
  // The penalized comparator: inf_f sum (f^T x - y)^2 + lambda |f|^2.
  const ComparatorFamily family = ComparatorFamily::linear(d);
  const LossModel model = LossModel::square(B);
  rel.comparator_loss = [=](std::span<const Observation> h) {
    return best_comparator_loss(family, model, h, lambda);
  };
  rel.parameters = {{"B", B},
                    {"lambda", lambda},
                    {"d", static_cast<double>(d)}};
  return rel;
}

RelaxationOracle conditional_rademacher_oracle(
    const ComparatorFamily& family, const LossModel& model,
    std::vector<CovariateId> covariates, std::vector<double> mu_grid, int n) {
  if (!family.is_finite()) {
    throw CapabilityError("conditional relaxation: finite family required");
  }
  const double C = model.grad_bound();  // the sum carries 2C
  auto cumulative = [family, model](std::span<const Observation> h) {
    std::vector<double> L(family.size(), 0.0);
    for (const Observation& o : h) {
      const CovariateId x = as_id(o.x);
      family.check_covariate(x);
      for (std::size_t f = 0; f < L.size(); ++f) {
        L[f] += model.value_unchecked(family.value(f, x), o.y);
      }
    }
    return L;
  };
  RelaxationOracle rel;
  rel.name = "conditional_rademacher";
  rel.horizon = n;
  rel.toy_scale = true;
  rel.evaluate = [=](std::span<const Observation> h) {
    if (static_cast<int>(h.size()) > n) {
      throw ShapeError("conditional relaxation: history longer than horizon");
    }
    std::vector<double> initial = cumulative(h);
    for (double& v : initial) v = -v;
    const ScalarFn offset = [model](double x) { return delta_lower(model, x); };
    return offset_rademacher_sup(family, covariates, mu_grid,
                                 n - static_cast<int>(h.size()), C, offset,
                                 initial);
  };
  rel.comparator_loss = [=](std::span<const Observation> h) {
    const std::vector<double> L = cumulative(h);
    return *std::min_element(L.begin(), L.end());
  };
  rel.parameters = {{"C", C}, {"B", model.B()}};
  return rel;
}

RelaxationOracle zero_oracle(int n) {
  RelaxationOracle rel;
  rel.name = "zero";
  rel.horizon = n;
  rel.evaluate = [](std::span<const Observation>) { return 0.0; };
  return rel;
}

double relaxation_forecast(const RelaxationOracle& rel, const LossModel& model,
                           std::span<const Observation> history,
                           const Covariate& x, const PredictionSet& predictions,
                           std::span<const double> outcome_grid,
                           bool force_generic) {
  if (outcome_grid.empty()) throw DomainError("forecast: empty outcome grid");
  History next(history.begin(), history.end());
  next.push_back({x, 0.0});
  std::vector<double> cont(outcome_grid.size());
  for (std::size_t i = 0; i < outcome_grid.size(); ++i) {
    next.back().y = outcome_grid[i];
    cont[i] = rel.evaluate(next);
  }
  const double B = model.B();
  const auto* interval = std::get_if<Interval>(&predictions);
  if (!force_generic && model.kind() == LossKind::kSquare &&
      is_symmetric_pair(outcome_grid, B) && interval != nullptr &&
      interval->lo <= -B && interval->hi >= B) {
    const bool plus_first = outcome_grid[0] > outcome_grid[1];
    const double up = plus_first ? cont[0] : cont[1];
    const double down = plus_first ? cont[1] : cont[0];
    return clip((up - down) / (4.0 * B), B);
  }
  auto objective = [&](double yhat) {
    double worst = -kInfinity;
    for (std::size_t i = 0; i < cont.size(); ++i) {
      worst = std::max(worst,
                       model.value_unchecked(yhat, outcome_grid[i]) + cont[i]);
    }
    return worst;
  };
  if (interval != nullptr) {
    return golden_section(objective, interval->lo, interval->hi,
                          kForecastTolerance)
        .argmin;
  }
  const auto& grid = std::get<std::vector<double>>(predictions);
  if (grid.empty()) throw DomainError("forecast: empty prediction grid");
  double best = kInfinity, arg = grid.front();
  for (double p : grid) {
    const double v = objective(p);
    if (v < best || (v == best && p < arg)) {
      best = v;
      arg = p;
    }
  }
  return arg;
}

namespace {

class ExpertsForecaster final : public Forecaster {
 public:
  ExpertsForecaster(ComparatorFamily family, double B, double temperature)
      : family_(std::move(family)),
        B_(B),
        tau_(resolve_temperature(B, temperature)) {
    if (!family_.is_finite()) {
      throw CapabilityError("experts: the family must be a finite table");
    }
    reset();
  }
  std::string name() const override { return "experts"; }
  void reset() override { losses_.assign(family_.size(), 0.0); }
  double predict(const Covariate& x) override {
    const CovariateId id = as_id(x);
    family_.check_covariate(id);
    std::vector<double> up(losses_.size()), down(losses_.size());
    for (std::size_t f = 0; f < losses_.size(); ++f) {
      const double v = family_.value(f, id);
      up[f] = -(losses_[f] + (v - B_) * (v - B_)) / tau_;
      down[f] = -(losses_[f] + (v + B_) * (v + B_)) / tau_;
    }
    return clip(tau_ / (4.0 * B_) * (log_sum_exp(up) - log_sum_exp(down)), B_);
  }
  void observe(const Covariate& x, double y) override {
    const CovariateId id = as_id(x);
    for (std::size_t f = 0; f < losses_.size(); ++f) {
      const double r = family_.value(f, id) - y;
      losses_[f] += r * r;
    }
  }

 private:
  ComparatorFamily family_;
  double B_;
  double tau_;
  std::vector<double> losses_;
};

class VawForecaster final : public Forecaster {
 public:
  VawForecaster(int d, double lambda, double B) : d_(d), lambda_(lambda), B_(B) {
    if (d < 1) throw DomainError("vaw: dimension must be positive");
    if (!(lambda > 0.0)) throw DomainError("vaw: lambda must be positive");
    reset();
  }
  std::string name() const override { return "vaw"; }
  void reset() override {
    A_ = lambda_ * Eigen::MatrixXd::Identity(d_, d_);
    b_ = Eigen::VectorXd::Zero(d_);
  }
  double predict(const Covariate& x) override {
    const Eigen::VectorXd& z = as_vector(x, d_);
    Eigen::MatrixXd A = A_;
    A.selfadjointView<Eigen::Lower>().rankUpdate(z);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
      throw NumericError("vaw: Gram matrix is not positive definite");
    }
    return clip(z.dot(llt.solve(b_)), B_);
  }
  void observe(const Covariate& x, double y) override {
    const Eigen::VectorXd& z = as_vector(x, d_);
    A_.selfadjointView<Eigen::Lower>().rankUpdate(z);
    b_ += y * z;
  }

 private:
  int d_;
  double lambda_;
  double B_;
  Eigen::MatrixXd A_;  // lower triangle holds lambda I + sum z z^T
  Eigen::VectorXd b_;
};

class RelaxationForecaster final : public Forecaster {
 public:
  RelaxationForecaster(RelaxationOracle rel, LossModel model,
                       PredictionSet predictions, std::vector<double> grid)
      : rel_(std::move(rel)),
        model_(std::move(model)),
        predictions_(std::move(predictions)),
        grid_(std::move(grid)) {}
  std::string name() const override { return "relaxation:" + rel_.name; }
  void reset() override { history_.clear(); }
  double predict(const Covariate& x) override {
    return relaxation_forecast(rel_, model_, history_, x, predictions_, grid_);
  }
  void observe(const Covariate& x, double y) override {
    history_.push_back({x, y});
  }

 private:
  RelaxationOracle rel_;
  LossModel model_;
  PredictionSet predictions_;
  std::vector<double> grid_;
  History history_;
};

class ComparatorForecaster final : public Forecaster {
 public:
  ComparatorForecaster(ComparatorFamily family, PredictorHandle handle)
      : family_(std::move(family)), handle_(std::move(handle)) {}
  std::string name() const override { return "comparator"; }
  void reset() override {}
  double predict(const Covariate& x) override {
    return family_.evaluate(handle_, x);
  }
  void observe(const Covariate&, double) override {}

 private:
  ComparatorFamily family_;
  PredictorHandle handle_;
};

// Incremental inf_f of the cumulative loss over a growing prefix.
class ComparatorTracker {
 public:
  ComparatorTracker(const ComparatorFamily& family, const LossModel& model,
                    double ridge)
      : family_(family), model_(model), ridge_(ridge) {
    if (family.is_finite()) {
      losses_.assign(family.size(), 0.0);
    } else if (family.kind() == FamilyKind::kLinear &&
               model.kind() == LossKind::kSquare &&
               std::isinf(family.weight_norm_bound())) {
      const int d = family.dimension();
      A_ = ridge * Eigen::MatrixXd::Identity(d, d);
      b_ = Eigen::VectorXd::Zero(d);
      linear_ = true;
    }
  }

  double push(const Observation& o) {
    history_.push_back(o);
    if (family_.is_finite()) {
      const CovariateId x = as_id(o.x);
      family_.check_covariate(x);
      for (std::size_t f = 0; f < losses_.size(); ++f) {
        losses_[f] += model_.value_unchecked(family_.value(f, x), o.y);
      }
      return *std::min_element(losses_.begin(), losses_.end());
    }
    if (linear_) {
      const Eigen::VectorXd& z = as_vector(o.x, family_.dimension());
      A_ += z * z.transpose();
      b_ += o.y * z;
      yy_ += o.y * o.y;
      const Eigen::VectorXd w =
          ridge_ > 0.0 ? Eigen::VectorXd(A_.llt().solve(b_))
                       : Eigen::VectorXd(A_.completeOrthogonalDecomposition().solve(b_));
      return std::max(0.0, yy_ - b_.dot(w));
    }
    return best_comparator_loss(family_, model_, history_, ridge_);
  }

 private:
  const ComparatorFamily& family_;
  const LossModel& model_;
  double ridge_;
  History history_;
  std::vector<double> losses_;
  bool linear_ = false;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double yy_ = 0.0;
};

}  // namespace

std::unique_ptr<Forecaster> make_experts_forecaster(ComparatorFamily family,
                                                    double B,
                                                    double temperature) {
  return std::make_unique<ExpertsForecaster>(std::move(family), B, temperature);
}

std::unique_ptr<Forecaster> make_vaw_forecaster(int d, double lambda,
                                                double B) {
  return std::make_unique<VawForecaster>(d, lambda, B);
}

std::unique_ptr<Forecaster> make_relaxation_forecaster(
    RelaxationOracle rel, LossModel model, PredictionSet predictions,
    std::vector<double> outcome_grid) {
  return std::make_unique<RelaxationForecaster>(
      std::move(rel), std::move(model), std::move(predictions),
      std::move(outcome_grid));
}

std::unique_ptr<Forecaster> make_comparator_forecaster(ComparatorFamily family,
                                                       PredictorHandle handle) {
  return std::make_unique<ComparatorForecaster>(std::move(family),
                                                std::move(handle));
}

RunResult run_online(Forecaster& forecaster,
                     std::span<const Observation> sequence,
                     const LossModel& model, const ComparatorFamily& family,
                     double ridge) {
  RunResult result;
  ComparatorTracker tracker(family, model, ridge);
  forecaster.reset();
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const Observation& o = sequence[i];
    RoundRecord rec;
    rec.t = static_cast<int>(i) + 1;
    rec.x = o.x;
    rec.y = o.y;
    try {
      rec.yhat = forecaster.predict(o.x);
      rec.loss = loss_value(model, rec.yhat, o.y);
      forecaster.observe(o.x, o.y);
    } catch (const std::exception& e) {
      throw RunAborted("run aborted at round " + std::to_string(rec.t) + ": " +
                           e.what(),
                       std::move(result.records));
    }
    result.learner_loss += rec.loss;
    result.comparator_loss = tracker.push(o);
    rec.cumulative_regret = result.learner_loss - result.comparator_loss;
    result.records.push_back(std::move(rec));
  }
  result.final_regret = result.learner_loss - result.comparator_loss;
  return result;
}

double regret_bound(BoundKind kind, const BoundParams& p) {
  switch (kind) {
    case BoundKind::kExperts:
      if (p.family_size == 0) throw DomainError("bound: empty family");
      return p.B * p.B * std::log(static_cast<double>(p.family_size));
    case BoundKind::kVaw: {
      if (!(p.lambda > 0.0) || p.d < 1) {
        throw DomainError("bound: lambda and d must be positive");
      }
      const double ratio = p.n / (p.lambda * p.d);
      if (!(ratio >= 1.0)) {
        throw DomainError("bound: n < lambda d makes the log term negative");
      }
      return 4.0 * p.d * p.B * p.B * std::log(ratio);
    }
  }
  throw DomainError("bound: unknown kind");
}

}  // namespace seqreg
