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

#include "seqreg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

constexpr double kDomainSlack = 1e-12;

std::string describe(const Interval& iv) {
  std::ostringstream os;
  os << "[" << iv.lo << ", " << iv.hi << "]";
  return os.str();
}

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

double logistic_second_derivative(double yhat, double y) {
  const double z = yhat * y;
  // e^z / (1 + e^z)^2, written symmetrically to avoid overflow.
  const double e = std::exp(-std::abs(z));
  return y * y * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

LossModel::LossModel(LossKind kind, double q, double B,
                     std::optional<Interval> pred)
    : kind_(kind), q_(q) {
  if (!(B > 0) || !std::isfinite(B)) {
    throw DomainError("loss: outcome bound B must be positive and finite");
  }
  outcome_ = {-B, B};
  prediction_ = pred.value_or(Interval{-B, B});
  if (!(prediction_.lo <= prediction_.hi) || !std::isfinite(prediction_.lo) ||
      !std::isfinite(prediction_.hi)) {
    throw DomainError("loss: prediction range " + describe(prediction_) +
                      " is empty or unbounded");
  }
  derive_constants();
}

LossModel LossModel::square(double B, std::optional<Interval> prediction) {
  return LossModel(LossKind::kSquare, 2.0, B, prediction);
}

LossModel LossModel::absolute(double B, std::optional<Interval> prediction) {
  return LossModel(LossKind::kAbsolute, 1.0, B, prediction);
}

LossModel LossModel::q_loss(double q, double B,
                            std::optional<Interval> prediction) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw DomainError("q_loss: exponent q must exceed 1");
  }
  return LossModel(LossKind::kQLoss, q, B, prediction);
}

LossModel LossModel::logistic(double B, std::optional<Interval> prediction) {
  return LossModel(LossKind::kLogistic, 2.0, B, prediction);
}

LossModel LossModel::from_config(const LossConfig& c) {
  LossModel m = [&] {
    if (c.name == "square") return square(c.B, c.prediction_range);
    if (c.name == "absolute") return absolute(c.B, c.prediction_range);
    if (c.name == "logistic") return logistic(c.B, c.prediction_range);
    if (c.name == "q_loss") {
      if (!c.q) throw ConfigError("loss: q_loss requires field 'q'");
      return q_loss(*c.q, c.B, c.prediction_range);
    }
    throw ConfigError("loss: unknown name '" + c.name + "'");
  }();
  if (c.K) {
    if (!(*c.K >= 0)) throw ConfigError("loss: K must be nonnegative");
    m.K_ = *c.K;
  }
  if (c.r) {
    if (!(*c.r >= 2)) throw ConfigError("loss: r must be at least 2");
    m.r_ = *c.r;
  }
  return m;
}

LossConfig LossModel::config() const {
  LossConfig c;
  c.name = name();
  c.B = B();
  if (kind_ == LossKind::kQLoss) c.q = q_;
  c.K = K_;
  c.r = r_;
  c.prediction_range = prediction_;
  return c;
}

std::string LossModel::name() const {
  switch (kind_) {
    case LossKind::kSquare:
      return "square";
    case LossKind::kAbsolute:
      return "absolute";
    case LossKind::kQLoss:
      return "q_loss";
    case LossKind::kLogistic:
      return "logistic";
  }
  return "unknown";
}

void LossModel::derive_constants() {
  const double B = outcome_.hi;
  const double P = prediction_.max_abs();
  // Largest |yhat - y| over the rectangle.
  const double D = std::max(prediction_.hi + B, B - prediction_.lo);
  switch (kind_) {
    case LossKind::kSquare:
      grad_bound_ = 2.0 * D;
      K_ = 1.0;
      r_ = 2.0;
      break;
    case LossKind::kAbsolute:
      grad_bound_ = 1.0;
      K_ = 0.0;
      r_ = 2.0;
      break;
    case LossKind::kQLoss:
      grad_bound_ = q_ * std::pow(D, q_ - 1.0);
      if (q_ < 2.0) {
        // Second derivative q(q-1)|u|^(q-2) is smallest at |u| = D.
        K_ = 0.5 * q_ * (q_ - 1.0) * std::pow(D, q_ - 2.0);
        r_ = 2.0;
      } else {
        // |w|^q is q-uniformly convex with modulus 1 / (2^(q-1) - 1).
        K_ = 1.0 / (std::pow(2.0, q_ - 1.0) - 1.0);
        r_ = q_;
      }
      break;
    case LossKind::kLogistic: {
      grad_bound_ = B / (1.0 + std::exp(-P * B));
      constexpr double kStep = 1e-3;
      const int na = std::max(1, static_cast<int>(
                                     std::ceil(prediction_.width() / kStep)));
      const int ny = std::max(1, static_cast<int>(std::ceil(2.0 * B / kStep)));
      double inf_curv = kInfinity;
      for (int i = 0; i <= na; ++i) {
        const double a = prediction_.lo + prediction_.width() * i / na;
        for (int j = 0; j <= ny; ++j) {
          const double y = -B + 2.0 * B * j / ny;
          inf_curv = std::min(inf_curv, logistic_second_derivative(a, y));
        }
      }
      K_ = 0.5 * inf_curv;
      r_ = 2.0;
      break;
    }
  }
}

double LossModel::value_unchecked(double yhat, double y) const {
  switch (kind_) {
    case LossKind::kSquare: {
      const double d = yhat - y;
      return d * d;
    }
    case LossKind::kAbsolute:
      return std::abs(yhat - y);
    case LossKind::kQLoss:
      return std::pow(std::abs(yhat - y), q_);
    case LossKind::kLogistic: {
      const double z = -yhat * y;
      return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
  }
  return 0.0;
}

double LossModel::subgradient_unchecked(double yhat, double y) const {
  const double d = yhat - y;
  switch (kind_) {
    case LossKind::kSquare:
      return 2.0 * d;
    case LossKind::kAbsolute:
      return sign(d);
    case LossKind::kQLoss:
      return q_ * std::pow(std::abs(d), q_ - 1.0) * sign(d);
    case LossKind::kLogistic: {
      const double z = yhat * y;
      // -y / (1 + e^z)
      if (z > 0) {
        const double e = std::exp(-z);
        return -y * e / (1.0 + e);
      }
      return -y / (1.0 + std::exp(z));
    }
  }
  return 0.0;
}

void LossModel::check_arguments(double yhat, double y) const {
  if (!prediction_.contains(yhat, kDomainSlack)) {
    std::ostringstream os;
    os << name() << " loss: prediction " << yhat
       << " outside prediction range " << describe(prediction_);
    throw DomainError(os.str());
  }
  if (!outcome_.contains(y, kDomainSlack)) {
    std::ostringstream os;
    os << name() << " loss: outcome " << y << " outside outcome range "
       << describe(outcome_);
    throw DomainError(os.str());
  }
}

double loss_value(const LossModel& model, double yhat, double y) {
  model.check_arguments(yhat, y);
  return model.value_unchecked(yhat, y);
}

double loss_subgradient(const LossModel& model, double yhat, double y) {
  model.check_arguments(yhat, y);
  return model.subgradient_unchecked(yhat, y);
}

double taylor_residual(const LossModel& model, double a, double b, double y) {
  model.check_arguments(a, y);
  model.check_arguments(b, y);
  return model.value_unchecked(b, y) -
         (model.value_unchecked(a, y) +
          model.subgradient_unchecked(a, y) * (b - a));
}

double delta_lower(const LossModel& model, double x) {
  const double w = model.prediction_range().width();
  if (!(std::abs(x) <= w + kDomainSlack)) {
    std::ostringstream os;
    os << "delta_lower: separation " << x << " outside [" << -w << ", " << w
       << "]";
    throw DomainError(os.str());
  }
  const double K = model.curvature_const();
  if (K == 0.0) return 0.0;
  const double r = model.curvature_power();
  return r == 2.0 ? K * x * x : K * std::pow(std::abs(x), r);
}

double delta_upper(const LossModel& model, double x) {
  const Interval& pred = model.prediction_range();
  switch (model.kind()) {
    case LossKind::kSquare: {
      const double w = pred.width();
      if (!(std::abs(x) <= w + kDomainSlack)) {
        throw DomainError("delta_upper: separation outside the difference "
                          "set of the prediction range");
      }
      return x * x;
    }
    case LossKind::kQLoss: {
      if (model.q() >= 2.0) break;
      if (!pred.contains(0.0) || !pred.contains(x, kDomainSlack)) {
        throw DomainError("delta_upper: separation outside prediction "
                          "range minus {0}");
      }
      const double q = model.q();
      return 2.0 * q * (q - 1.0) * std::pow(model.B(), q - 2.0) * x * x;
    }
    default:
      break;
  }
  throw CapabilityError("delta_upper: no restricted-smoothness set is "
                        "configured for " + model.name() + " loss");
}

TwoPointWitness two_point_witness(const LossModel& model, double s) {
  const double B = model.B();
  switch (model.kind()) {
    case LossKind::kSquare: {
      const double delta = B - std::abs(s);
      if (!(delta > 0) || !model.prediction_range().contains(s)) {
        throw DomainError("two_point_witness: square loss needs |s| < B");
      }
      return {s, s - delta, s + delta, 2.0 * delta};
    }
    case LossKind::kQLoss:
      if (model.q() < 2.0) {
        if (s != 0.0 || !model.prediction_range().contains(0.0)) {
          throw DomainError("two_point_witness: q-loss witnesses exist "
                            "only at s = 0");
        }
        return {0.0, -B, B, model.q() * std::pow(B, model.q() - 1.0)};
      }
      break;
    default:
      break;
  }
  throw CapabilityError("two_point_witness: not configured for " +
                        model.name() + " loss");
}

double power_gamma_star(double K, double r, double s) {
  if (!(s >= 0)) throw DomainError("gamma_star: argument must be >= 0");
  if (!(K >= 0) || !(r >= 2)) {
    throw DomainError("gamma_star: need K >= 0 and r >= 2");
  }
  if (s == 0.0) return 0.0;
  if (r == 2.0) return s <= K ? 0.0 : kInfinity;
  if (K == 0.0) return kInfinity;
  // Maximizer u* = (2s / (K r))^(2/(r-2)).
  return 0.5 * (r - 2.0) * K * std::pow(2.0 * s / (K * r), r / (r - 2.0));
}

double gamma_star(const LossModel& model, double s) {
  return power_gamma_star(model.curvature_const(), model.curvature_power(), s);
}

double gamma_star_upper_estimate(const LossModel& model, double s) {
  const double K = model.curvature_const();
  const double r = model.curvature_power();
  if (r == 2.0) return gamma_star(model, s);
  if (!(s >= 0)) throw DomainError("gamma_star: argument must be >= 0");
  if (s == 0.0) return 0.0;
  if (K == 0.0) return kInfinity;
  return (r - 2.0) / (2.0 * std::numbers::e) *
         std::pow(s, r / (r - 2.0)) / std::pow(K, 2.0 / (r - 2.0));
}

}  // namespace seqreg
