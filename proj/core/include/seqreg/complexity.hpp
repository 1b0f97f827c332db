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

#ifndef SEQREG_COMPLEXITY_HPP_
#define SEQREG_COMPLEXITY_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqreg/comparators.hpp"
#include "seqreg/numeric.hpp"
#include "seqreg/trees.hpp"

namespace seqreg {

// Real function of a real argument: offsets, conjugates, entropy profiles.
using ScalarFn = std::function<double(double)>;

// Depth above which path expectations switch from enumeration to sampling.
inline constexpr int kExactPathDepth = 20;

// Path expectation together with how it was obtained.
struct Expectation {
  double value = 0.0;
  double std_error = 0.0;  // 0 when exact
  bool exact = true;
  std::uint64_t samples = 0;  // paths averaged
  std::uint64_t seed = 0;     // sampling seed, meaningful when !exact
};

// ---------------------------------------------------------------------------
// Rademacher-type complexities of finite-table families.

// E_eps max_f sum_t eps_t f(x_t(eps)), by enumeration of all paths.
double seq_rademacher(const ComparatorFamily& family, const CovariateTree& x);

// E_eps max_f sum_t [2C eps_t (f - mu_t) - offset(f - mu_t)], f = f(x_t(eps)).
double offset_rademacher(const ComparatorFamily& family,
                         const CovariateTree& x, const RealTree& mu, double C,
                         const ScalarFn& offset);

// Exact below kExactPathDepth, otherwise a Monte Carlo average over `samples`
// paths drawn with the given seed.
Expectation offset_rademacher_estimate(const ComparatorFamily& family,
                                       const CovariateTree& x,
                                       const RealTree& mu, double C,
                                       const ScalarFn& offset,
                                       std::uint64_t samples = 1 << 16,
                                       std::uint64_t seed = 0x5eed);

// Work guard for offset_rademacher_sup: (2 |X| |mu_grid|)^n |F|.
inline constexpr double kSupSearchGuard = 2e8;

// Supremum of offset_rademacher over all covariate trees labelled from
// `covariates` and mean trees labelled from `mu_grid`. The labels of distinct
// nodes are free, so the supremum is a node-by-node dynamic program over the
// per-predictor partial sums. `initial` (one entry per predictor, default 0)
// is added to each predictor's sum before the first round.
double offset_rademacher_sup(const ComparatorFamily& family,
                             std::span<const CovariateId> covariates,
                             std::span<const double> mu_grid, int n, double C,
                             const ScalarFn& offset,
                             std::span<const double> initial = {});

// Predicted DP work of offset_rademacher_sup.
double offset_rademacher_sup_work(std::size_t family_size,
                                  std::size_t num_covariates,
                                  std::size_t mu_grid_size, int n);

// ---------------------------------------------------------------------------
// Finite-collection bounds.

// inf over lambda > 0 of log_size / lambda + n gamma_star(2 C^2 lambda). The
// feasible region of lambda is located by bisection and the objective, convex
// in log lambda, is minimized on it by golden section over [e^-30, e^30].
double finite_class_offset_bound_log(double log_size, int n, double C,
                                     const ScalarFn& gamma_star);

double finite_class_offset_bound(std::uint64_t size_W, int n, double C,
                                 const ScalarFn& gamma_star);

// G sqrt(2 log|W| max_{w, eps} sum_t w_t(eps)^2).
double finite_class_linear_bound(std::span<const RealTree> W, double G);

// ---------------------------------------------------------------------------
// Sequential covers and fat-shattering.

enum class CoverNorm { kL2, kLinf };

struct CoverReport {
  double beta = 0.0;
  CoverNorm norm = CoverNorm::kLinf;
  std::size_t size = 0;
  std::vector<RealTree> cover;
  // certificate[f][path bits] indexes the covering tree of predictor f on
  // that path.
  std::vector<std::vector<std::size_t>> certificate;
  std::uint64_t candidates = 0;  // selector trees examined
};

inline constexpr double kCoverCandidateGuard = 2e6;

// Smallest cover made of selector trees (every node label is some f(x_t)),
// found by greedy seeding and exact branch and bound over set cover.
CoverReport seq_cover_number(const ComparatorFamily& family,
                             const CovariateTree& x, double beta,
                             CoverNorm norm);

// True iff the report's certificate is a valid beta-cover.
bool verify_cover(const ComparatorFamily& family, const CovariateTree& x,
                  const CoverReport& report);

struct ShatterCertificate {
  int depth = 0;
  CovariateTree covariate_tree;
  RealTree witness;
  std::vector<std::size_t> selectors;  // indexed by packed path bits
};

struct FatShatteringResult {
  int dimension = 0;
  std::optional<ShatterCertificate> certificate;
};

// Largest d <= max_depth such that some covariate tree of depth d over
// `covariates` is beta-shattered. Witness labels range over midpoints of
// achievable value pairs and the optional extra grid.
FatShatteringResult fat_shattering(const ComparatorFamily& family,
                                   std::span<const CovariateId> covariates,
                                   double beta, int max_depth,
                                   std::span<const double> extra_witnesses = {});

bool verify_shatter_certificate(const ComparatorFamily& family,
                                const ShatterCertificate& certificate,
                                double beta);

// (2 e n / beta)^fat.
double cover_fat_bound(double beta, int n, int fat);

// ---------------------------------------------------------------------------
// Chaining.

// 4 rho n + 12 sqrt(n) int_rho^gamma sqrt(log_cover(delta)) d delta.
double dudley_bound(const ScalarFn& log_cover, int n, double rho, double gamma);

// Minimum of dudley_bound over rho in (0, gamma].
Minimum dudley_bound_optimized(const ScalarFn& log_cover, int n, double gamma);

// Right-continuous step function delta -> log N(delta) of a finite
// instance, exact for every delta >= 0.
class EntropyProfile {
 public:
  EntropyProfile(std::vector<double> scales, std::vector<double> log_sizes);

  double operator()(double delta) const;
  // int_a^b sqrt(log N(delta)) d delta, exact.
  double integral_sqrt(double a, double b) const;
  // Exact min over rho in (0, gamma] of the Dudley expression; the minimum
  // of a piecewise linear function sits at a breakpoint or an end point.
  Minimum dudley_minimum(int n, double gamma) const;

  const std::vector<double>& scales() const { return scales_; }
  const std::vector<double>& log_sizes() const { return log_sizes_; }

 private:
  std::vector<double> scales_;     // ascending, scales_[0] == 0
  std::vector<double> log_sizes_;  // log N on [scales_[i], scales_[i+1])
};

// Entropy profile of a finite family on a covariate tree: covers are solved
// at every distinct achievable distance.
EntropyProfile cover_entropy(const ComparatorFamily& family,
                             const CovariateTree& x, CoverNorm norm);

// inf over gamma of { C inf_rho [4 rho n + 12 sqrt(n) int_rho^gamma
// sqrt(log N)] + inf_lambda [log N(gamma/2) / lambda + n gamma_star(2 C^2
// lambda)] } with nested log-axis searches.
double chained_offset_bound(const ScalarFn& log_cover_linf, int n, double C,
                            const ScalarFn& gamma_star);

// ---------------------------------------------------------------------------
// Rates (per-round, i.e. V_n / n).

struct RateConstants {
  double c = 1.0;         // leading constant
  double c_family = 1.0;  // constant of the parametric branch
};

double rate_upper(double p, double r, double G, double K, int n,
                  const RateConstants& constants = {});
double rate_lower(double p, double r, double R, double K, int n,
                  const RateConstants& constants = {});

// Exponent of n in the dominant branch for large n.
double rate_upper_exponent(double p, double r, double K);
double rate_lower_exponent(double p, double r, double K);

// Power of log n multiplying the dominant branch of rate_upper.
double rate_upper_log_power(double p, double K);

// log of the covering bound (e M / s)^s beta^(-s) for s-sparse mixtures.
double sparse_cover_bound(int M, int s, double beta);
// s log(M / s) / n.
double sparse_rate(int M, int s, int n);

struct KhinchineResult {
  double mean_abs_sum = 0.0;  // E |eps_1 + ... + eps_k|
  bool holds = false;         // mean_abs_sum >= sqrt(k / 2)
};

inline constexpr int kKhinchineGuard = 24;

KhinchineResult khinchine_check(int k);

}  // namespace seqreg

#endif  // SEQREG_COMPLEXITY_HPP_
