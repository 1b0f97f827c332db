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

#ifndef SEQREG_LOSSES_HPP_
#define SEQREG_LOSSES_HPP_

#include <optional>
#include <string>

namespace seqreg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v, double slack = 1e-12) const {
    return v >= lo - slack && v <= hi + slack;
  }
  double width() const { return hi - lo; }
  double max_abs() const { return lo < -hi ? -lo : hi; }
  bool operator==(const Interval&) const = default;
};

enum class LossKind { kSquare, kAbsolute, kQLoss, kLogistic };

// Serializable description of a loss; see LossModel::from_config.
struct LossConfig {
  std::string name = "square";  // square | absolute | q_loss | logistic
  double B = 1.0;
  std::optional<double> q;
  std::optional<double> K;  // overrides the built-in curvature constant
  std::optional<double> r;  // overrides the built-in curvature power
  std::optional<Interval> prediction_range;  // defaults to [-B, B]
};

// A convex loss l(yhat, y) on prediction_range x [-B, B] together with the
// constants that drive the regret bounds: the subgradient bound G and a
// curvature minorant K * |t|^r of the first-order Taylor residual.
class LossModel {
 public:
  static LossModel square(double B, std::optional<Interval> prediction = {});
  static LossModel absolute(double B, std::optional<Interval> prediction = {});
  static LossModel q_loss(double q, double B,
                          std::optional<Interval> prediction = {});
  static LossModel logistic(double B, std::optional<Interval> prediction = {});
  static LossModel from_config(const LossConfig& config);

  LossConfig config() const;

  LossKind kind() const { return kind_; }
  std::string name() const;
  double q() const { return q_; }
  double B() const { return outcome_.hi; }
  const Interval& outcome_range() const { return outcome_; }
  const Interval& prediction_range() const { return prediction_; }
  double grad_bound() const { return grad_bound_; }
  double curvature_const() const { return K_; }
  double curvature_power() const { return r_; }

  // Unchecked evaluation for hot loops; callers guarantee the domain.
  double value_unchecked(double yhat, double y) const;
  double subgradient_unchecked(double yhat, double y) const;

  // Throws DomainError naming the violated interval.
  void check_arguments(double yhat, double y) const;

 private:
  LossModel(LossKind kind, double q, double B, std::optional<Interval> pred);
  void derive_constants();

  LossKind kind_;
  double q_ = 2.0;
  Interval outcome_;
  Interval prediction_;
  double grad_bound_ = 0.0;
  double K_ = 0.0;
  double r_ = 2.0;
};

double loss_value(const LossModel& model, double yhat, double y);

// A subgradient in yhat; at kinks the midpoint of the subdifferential.
double loss_subgradient(const LossModel& model, double yhat, double y);

// l(b,y) - l(a,y) - dl(a,y) * (b - a).
double taylor_residual(const LossModel& model, double a, double b, double y);

// Curvature minorant K * |x|^r of the Taylor residual; x must lie in the
// difference set of the prediction range.
double delta_lower(const LossModel& model, double x);

// Smoothness majorant of the Taylor residual over the configured
// restricted-smoothness set S: all of the prediction range for square loss,
// S = {0} for q-loss with q in (1, 2). Other models throw CapabilityError.
double delta_upper(const LossModel& model, double x);

// Two outcomes whose equal mixture has s as an expected-loss minimizer and
// whose subgradients at s are +R and -R.
struct TwoPointWitness {
  double s = 0.0;
  double y_plus = 0.0;   // dl(s, y_plus) = +R
  double y_minus = 0.0;  // dl(s, y_minus) = -R
  double R = 0.0;
};

TwoPointWitness two_point_witness(const LossModel& model, double s);

// Conjugate of u -> K * u^(r/2) on u >= 0, evaluated at s >= 0. For r = 2 it
// is the indicator 0 on [0, K], +inf beyond. Nondecreasing in s.
double power_gamma_star(double K, double r, double s);

// power_gamma_star with the model's curvature constants.
double gamma_star(const LossModel& model, double s);

// Closed-form upper estimate ((r-2)/(2e)) s^(r/(r-2)) / K^(2/(r-2)) of the
// conjugate for r > 2; equals gamma_star when r = 2.
double gamma_star_upper_estimate(const LossModel& model, double s);

}  // namespace seqreg

#endif  // SEQREG_LOSSES_HPP_
