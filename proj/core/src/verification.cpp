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

#include "seqreg/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>

#include "seqreg/comparators.hpp"
#include "seqreg/complexity.hpp"
#include "seqreg/forecasters.hpp"
#include "seqreg/harness.hpp"
#include "seqreg/losses.hpp"
#include "seqreg/minimax.hpp"
#include "seqreg/numeric.hpp"
#include "seqreg/rng.hpp"
#include "seqreg/trees.hpp"

namespace seqreg {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

CheckResult primary(std::string id, std::string title, bool passed,
                    double margin, std::string detail, double seconds) {
  return {std::move(id), std::move(title), passed, false, margin,
          std::move(detail), seconds};
}

CheckResult info(std::string id, std::string title, double margin,
                 std::string detail) {
  return {std::move(id), std::move(title), true, true, margin,
          std::move(detail), 0.0};
}

ComparatorFamily random_table(PortableRng& rng, std::size_t rows,
                              std::size_t cols, double lo, double hi) {
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = rng.uniform(lo, hi);
  }
  return ComparatorFamily::finite_table(std::move(m));
}

Eigen::VectorXd unit_ball(PortableRng& rng, int d) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  const double norm = v.norm();
  if (norm == 0.0) return v;
  return v * (std::pow(rng.uniform(), 1.0 / d) / norm);
}

std::size_t heap_index(int t, std::uint64_t i) {
  return (std::size_t{1} << (t - 1)) - 1 + static_cast<std::size_t>(i);
}

// Covariate tree whose node (t, i) is labelled by its heap index.
CovariateTree identity_tree(int n) {
  return CovariateTree::generate(
      n, [](int t, std::uint64_t i) { return heap_index(t, i); });
}

const std::vector<double> kFivePoint = {-1.0, -0.5, 0.0, 0.5, 1.0};

// ---------------------------------------------------------------------------
// Experts regret.

// Greedy adversary maximizing the one-round increase of the regret.
std::vector<Observation> best_response_sequence(const ComparatorFamily& family,
                                                Forecaster& forecaster, int n,
                                                std::span<const double> grid) {
  forecaster.reset();
  std::vector<double> L(family.size(), 0.0);
  double best_L = 0.0;
  std::vector<Observation> seq;
  for (int t = 0; t < n; ++t) {
    double best = -kInfinity;
    CovariateId bx = 0;
    double by = grid.front();
    for (CovariateId x = 0; x < family.num_covariates(); ++x) {
      const double yhat = forecaster.predict(Covariate{x});
      for (double y : grid) {
        double m = kInfinity;
        for (std::size_t f = 0; f < L.size(); ++f) {
          const double r = family.value(f, x) - y;
          m = std::min(m, L[f] + r * r);
        }
        const double inc = (yhat - y) * (yhat - y) - (m - best_L);
        if (inc > best) {
          best = inc;
          bx = x;
          by = y;
        }
      }
    }
    best_L = kInfinity;
    for (std::size_t f = 0; f < L.size(); ++f) {
      const double r = family.value(f, bx) - by;
      L[f] += r * r;
      best_L = std::min(best_L, L[f]);
    }
    forecaster.observe(Covariate{bx}, by);
    seq.push_back({bx, by});
  }
  return seq;
}

struct ExpertsSweep {
  double worst_regret = -kInfinity;
  double bound = 0.0;
  int runs = 0;
  std::string worst_kind;
};

ExpertsSweep experts_sweep(double temperature, int seeds, int n) {
  const double B = 1.0;
  const LossModel model = LossModel::square(B);
  ExpertsSweep out;
  const char* kinds[] = {"iid", "adversarial_oracle", "best_response"};
  for (int s = 0; s < seeds; ++s) {
    PortableRng rng(0xC1000 + static_cast<std::uint64_t>(s));
    const ComparatorFamily family = random_table(rng, 10, 4, -B, B);
    const double tau = temperature > 0 ? temperature : B * B;
    out.bound = tau * std::log(10.0);
    std::vector<Observation> seq;
    const int kind = s % 3;
    if (kind == 2) {
      auto fc = make_experts_forecaster(family, B, temperature);
      seq = best_response_sequence(family, *fc, n, kFivePoint);
    } else {
      ExperimentConfig c;
      c.seed = rng.next_u64();
      c.loss.name = "square";
      c.loss.B = B;
      c.family = family;
      c.forecaster.kind = "experts";
      c.forecaster.temperature = temperature;
      c.horizon = n;
      if (kind == 0) {
        c.generator.kind = "iid_noise";
        c.generator.expert = rng.below(family.size());
        c.generator.noise = 0.5;
      } else {
        // The first three experts on the first two covariates, replayed in
        // blocks of three rounds.
        GameSpec game;
        game.family = ComparatorFamily::finite_table(
            family.values().topLeftCorner(3, 2));
        game.model = model;
        game.horizon = 3;
        game.covariates = {0, 1};
        game.outcome_grid = kFivePoint;
        game.prediction_grid = kFivePoint;
        c.generator.kind = "adversarial_oracle";
        c.generator.game = game;
      }
      seq = generate_sequence(c);
    }
    auto fc = make_experts_forecaster(family, B, temperature);
    const RunResult run = run_online(*fc, seq, model, family);
    if (run.final_regret > out.worst_regret) {
      out.worst_regret = run.final_regret;
      out.worst_kind = kinds[kind];
    }
    ++out.runs;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimax games.

enum class GameRole { kAbsolute, kTwoPoint, kSquare };

struct TinyGame {
  std::string name;
  GameSpec game;  // horizon filled in per use
  GameRole role;
  double beta = 0.0;  // kTwoPoint
};

GameSpec make_game(Eigen::MatrixXd values, LossModel model,
                   std::vector<double> outcomes, std::vector<double> predictions) {
  GameSpec g;
  g.family = ComparatorFamily::finite_table(std::move(values));
  g.model = std::move(model);
  for (std::size_t x = 0; x < g.family.num_covariates(); ++x) {
    g.covariates.push_back(x);
  }
  g.outcome_grid = std::move(outcomes);
  g.prediction_grid = std::move(predictions);
  return g;
}

Eigen::MatrixXd column(std::initializer_list<double> v) {
  Eigen::MatrixXd m(v.size(), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

std::vector<TinyGame> tiny_games() {
  std::vector<TinyGame> games;
  const LossModel abs1 = LossModel::absolute(1.0);
  games.push_back({"abs {-1,1}, y in {-1,1}",
                   make_game(column({-1, 1}), abs1, {-1, 1}, kFivePoint),
                   GameRole::kAbsolute});
  games.push_back({"abs {-1,0,1}, y in {-1,0,1}",
                   make_game(column({-1, 0, 1}), abs1, {-1, 0, 1}, kFivePoint),
                   GameRole::kAbsolute});
  games.push_back({"abs {-1,0,1}, y on 5 points",
                   make_game(column({-1, 0, 1}), abs1, kFivePoint, kFivePoint),
                   GameRole::kAbsolute});

  // Two-point construction: S = {0}, outcomes {-B, B}, predictions and
  // family inside [-B/2, B/2].
  auto two_point = [&](std::string name, double B, Eigen::MatrixXd values,
                       double beta) {
    const double h = B / 2;
    std::vector<double> grid = {-h, -h / 2, 0.0, h / 2, h};
    games.push_back({std::move(name),
                     make_game(std::move(values),
                               LossModel::square(B, Interval{-h, h}), {-B, B},
                               grid),
                     GameRole::kTwoPoint, beta});
  };
  two_point("sq B=1 {-1/2,1/2}", 1.0, column({-0.5, 0.5}), 1.0);
  two_point("sq B=1 {-1/2,0,1/2}", 1.0, column({-0.5, 0.0, 0.5}), 1.0);
  two_point("sq B=2 {-1,1}", 2.0, column({-1.0, 1.0}), 2.0);
  {
    Eigen::MatrixXd m(3, 2);
    m << 0.5, -0.5, -0.5, 0.5, 0.5, 0.5;
    two_point("sq B=1 3 fns on 2 covariates", 1.0, m, 1.0);
  }

  const LossModel sq1 = LossModel::square(1.0);
  {
    Eigen::MatrixXd m(3, 2);
    m << 1, -1, 0, 1, -1, 0;
    games.push_back({"sq B=1 3 fns on 2 covariates, y in {-1,0,1}",
                     make_game(m, sq1, {-1, 0, 1}, kFivePoint),
                     GameRole::kSquare});
  }
  games.push_back({"sq B=1 {-1,1}, y in {-1,1}",
                   make_game(column({-1, 1}), sq1, {-1, 1}, kFivePoint),
                   GameRole::kSquare});
  games.push_back({"sq B=1 {-1/2,1/2}, y on 5 points",
                   make_game(column({-0.5, 0.5}), sq1, kFivePoint, kFivePoint),
                   GameRole::kSquare});
  return games;
}

// Evenly spaced grid of `points` values over the interval.
std::vector<double> fine_grid(const Interval& r, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) {
    g.push_back(r.lo + (r.hi - r.lo) * i / (points - 1));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Combinatorics.

struct CombinatoricsCache {
  std::size_t n2 = 0, ninf = 0, ninf_double = 0;
  double rad = 0.0, dudley = 0.0;
};

struct CombinatoricsTally {
  std::uint64_t instances = 0;
  std::uint64_t unique = 0;
  std::uint64_t failures_cover = 0, failures_fat = 0, failures_dudley = 0;
  double margin_cover = kInfinity, margin_fat = kInfinity,
         margin_dudley = kInfinity;
  std::string first_failure;
};

class CombinatoricsRunner {
 public:
  explicit CombinatoricsRunner(std::vector<double> betas)
      : betas_(std::move(betas)) {}

  // One (family, covariate tree) instance; fats holds fat_beta of the
  // family over its covariate set for each beta.
  void check(const Eigen::MatrixXd& table, std::span<const std::size_t> labels,
             int n, std::span<const int> fats, CombinatoricsTally& tally) {
    const std::size_t nodes = labels.size();
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(table.rows()));
    for (Eigen::Index f = 0; f < table.rows(); ++f) {
      std::string row(nodes, '\0');
      for (std::size_t j = 0; j < nodes; ++j) {
        row[j] = static_cast<char>(
            std::lround(table(f, static_cast<Eigen::Index>(labels[j]))) + 1);
      }
      rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::string key(1, static_cast<char>(n));
    for (const auto& r : rows) key += r;

    ++tally.instances;
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      ++tally.unique;
      Eigen::MatrixXd m(rows.size(), nodes);
      for (std::size_t f = 0; f < rows.size(); ++f) {
        for (std::size_t j = 0; j < nodes; ++j) m(f, j) = rows[f][j] - 1;
      }
      const ComparatorFamily fam = ComparatorFamily::finite_table(m);
      const CovariateTree x = identity_tree(n);
      std::vector<CombinatoricsCache> per_beta;
      const double rad = seq_rademacher(fam, x);
      const double dudley =
          cover_entropy(fam, x, CoverNorm::kL2).dudley_minimum(n, 2.0).value;
      for (double beta : betas_) {
        CombinatoricsCache c;
        c.n2 = seq_cover_number(fam, x, beta, CoverNorm::kL2).size;
        c.ninf = seq_cover_number(fam, x, beta, CoverNorm::kLinf).size;
        c.ninf_double = seq_cover_number(fam, x, 2 * beta, CoverNorm::kLinf).size;
        c.rad = rad;
        c.dudley = dudley;
        per_beta.push_back(c);
      }
      it = cache_.emplace(std::move(key), std::move(per_beta)).first;
    }
    for (std::size_t b = 0; b < betas_.size(); ++b) {
      const CombinatoricsCache& c = it->second[b];
      const double m_cover = static_cast<double>(c.ninf) - static_cast<double>(c.n2);
      const double bound = cover_fat_bound(betas_[b], n, fats[b]);
      const double m_fat = std::log(bound) - std::log(static_cast<double>(c.ninf_double));
      const double m_dudley = c.dudley - c.rad;
      tally.margin_cover = std::min(tally.margin_cover, m_cover);
      tally.margin_fat = std::min(tally.margin_fat, m_fat);
      tally.margin_dudley = std::min(tally.margin_dudley, m_dudley);
      auto note = [&](const char* what) {
        if (tally.first_failure.empty()) {
          tally.first_failure = format("%s at n=%d beta=%g", what, n, betas_[b]);
        }
      };
      if (m_cover < 0) {
        ++tally.failures_cover;
        note("N2 > Ninf");
      }
      if (m_fat < -1e-12) {
        ++tally.failures_fat;
        note("Ninf(2beta) above the fat bound");
      }
      if (m_dudley < -1e-9) {
        ++tally.failures_dudley;
        note("Dudley below Rad");
      }
    }
  }

 private:
  std::vector<double> betas_;
  std::unordered_map<std::string, std::vector<CombinatoricsCache>> cache_;
};

// All functions X -> {-1, 0, 1} as rows of a table.
Eigen::MatrixXd all_functions(int num_x) {
  const int count = static_cast<int>(std::pow(3, num_x));
  Eigen::MatrixXd m(count, num_x);
  for (int i = 0; i < count; ++i) {
    int v = i;
    for (int x = 0; x < num_x; ++x) {
      m(i, x) = v % 3 - 1;
      v /= 3;
    }
  }
  return m;
}

int fat_dimension(const Eigen::MatrixXd& table, double beta) {
  const ComparatorFamily fam = ComparatorFamily::finite_table(table);
  std::vector<CovariateId> xs(fam.num_covariates());
  std::iota(xs.begin(), xs.end(), CovariateId{0});
  return fat_shattering(fam, xs, beta, 4).dimension;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CheckResult> verify_experts_regret(VerifyLevel) {
  const auto t0 = Clock::now();
  const ExpertsSweep main = experts_sweep(0.0, 50, 1000);
  const double secs = seconds_since(t0);
  const double margin = main.bound - main.worst_regret;
  std::vector<CheckResult> out;
  out.push_back(primary(
      "1", "experts regret <= B^2 log|F|", margin >= -1e-9 && secs < 5.0,
      margin,
      format("%d runs, worst regret %.6f (%s) vs bound %.6f, %.2fs", main.runs,
             main.worst_regret, main.worst_kind.c_str(), main.bound, secs),
      secs));
  const ExpertsSweep wide = experts_sweep(2.0, 50, 1000);
  out.push_back(info(
      "1", "experts forecaster at temperature 2B^2", wide.bound - wide.worst_regret,
      format("worst regret %.6f (%s) vs 2B^2 log|F| = %.6f", wide.worst_regret,
             wide.worst_kind.c_str(), wide.bound)));
  return out;
}

std::vector<CheckResult> verify_vaw_regret(VerifyLevel) {
  const auto t0 = Clock::now();
  const double lambda = 1.0, B = 1.0;
  const int n = 1000;
  double worst = kInfinity;
  std::string where;
  int runs = 0;
  for (int d : {1, 2, 5}) {
    for (int s = 0; s < 20; ++s) {
      PortableRng rng(0xC2000 + 100 * static_cast<std::uint64_t>(d) + s);
      Eigen::VectorXd w_star(d);
      for (int i = 0; i < d; ++i) w_star(i) = rng.normal() / std::sqrt(d);
      auto fc = make_vaw_forecaster(d, lambda, B);
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
      double yy = 0.0, learner = 0.0;
      const bool adversarial = s % 2 == 1;
      for (int t = 0; t < n; ++t) {
        const Eigen::VectorXd x = unit_ball(rng, d);
        const double yhat = fc->predict(Covariate{x});
        // Adversarial rounds answer against the sign of the forecast.
        const double y = adversarial ? (yhat > 0 ? -B : B)
                                     : clip(w_star.dot(x) + 0.3 * rng.normal(), B);
        fc->observe(Covariate{x}, y);
        learner += (yhat - y) * (yhat - y);
        gram += x * x.transpose();
        b += y * x;
        yy += y * y;
      }
      const double log_term = 4.0 * d * B * B * std::log(n / (lambda * d)) / n;
      auto margin_for = [&](const Eigen::VectorXd& f) {
        const double cmp = yy - 2.0 * f.dot(b) + f.dot(gram * f);
        const double rhs = cmp / n + lambda * f.squaredNorm() / (2.0 * n) + log_term;
        return rhs - learner / n;
      };
      const Eigen::MatrixXd A =
          gram + 0.5 * lambda * Eigen::MatrixXd::Identity(d, d);
      const Eigen::VectorXd ridge = A.llt().solve(b);
      double m = margin_for(ridge);
      for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd f(d);
        for (int i = 0; i < d; ++i) f(i) = rng.normal();
        f *= 3.0 * rng.uniform() / std::max(f.norm(), 1e-300);
        m = std::min(m, margin_for(f));
      }
      if (m < worst) {
        worst = m;
        where = format("d=%d seed=%d %s", d, s, adversarial ? "adversarial" : "iid");
      }
      ++runs;
    }
  }
  const double secs = seconds_since(t0);
  return {primary("2", "VAW per-round regret inequality",
                  worst >= -1e-9 && secs < 10.0, worst,
                  format("%d runs x 101 comparators, worst slack %.3e (%s), %.2fs",
                         runs, worst, where.c_str(), secs),
                  secs)};
}

std::vector<CheckResult> verify_admissibility(VerifyLevel level,
                                              bool inject_broken) {
  const auto t0 = Clock::now();
  const bool full = level == VerifyLevel::kFull;
  const double tol = 1e-8;
  std::vector<CheckResult> out;

  // Experts: exhaustive histories over two covariates and outcomes {-1, 1}.
  const int n_exp = full ? 6 : 4;
  std::vector<Covariate> xs = {CovariateId{0}, CovariateId{1}};
  const std::vector<double> pm = {-1.0, 1.0};
  const std::vector<History> histories = enumerate_histories(xs, pm, n_exp);
  std::vector<ComparatorFamily> families;
  {
    PortableRng rng(0xC3000);
    for (std::size_t k : {1, 2, 3, 5}) {
      families.push_back(random_table(rng, k, 2, -1.0, 1.0));
    }
    Eigen::MatrixXd extreme(2, 2);
    extreme << 1, 1, -1, -1;
    families.push_back(ComparatorFamily::finite_table(extreme));
  }
  AdmissibilityGrids grids;
  grids.covariates = xs;
  grids.outcome_grid = pm;
  grids.predictions = Interval{-1.0, 1.0};
  grids.B = 1.0;
  const LossModel sq = LossModel::square(1.0);

  auto summarize = [](const AdmissibilityReport& r) {
    return std::min({r.worst_round_margin(), r.worst_recipe_margin(),
                     r.initial_margin});
  };
  double experts_worst = kInfinity, experts_wide_worst = kInfinity;
  std::string experts_where;
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto r = check_admissibility(experts_oracle(families[i], 1.0, n_exp),
                                       sq, grids, histories);
    const double m = summarize(r);
    if (m < experts_worst) {
      experts_worst = m;
      experts_where = format(
          "|F|=%zu, round %d: recursive %.4g, recipe %.4g, initial %.4g",
          families[i].size(),
          r.worst_round_site ? r.worst_round_site->t : 0,
          r.worst_round_margin(), r.worst_recipe_margin(), r.initial_margin);
    }
    const auto wide = check_admissibility(
        experts_oracle(families[i], 1.0, n_exp, 2.0), sq, grids, histories);
    experts_wide_worst = std::min(experts_wide_worst, summarize(wide));
  }

  // VAW: random histories with covariates from the unit ball.
  double vaw_worst = kInfinity, vaw_round = kInfinity, vaw_initial = kInfinity;
  int vaw_initial_failures = 0, vaw_total = 0;
  std::string vaw_where;
  const int vaw_histories = full ? 60 : 15;
  for (int d : {1, 2}) {
    for (int n = d + 1; n <= 6; ++n) {  // the log term needs n > lambda d
      PortableRng rng(0xC3100 + 10 * static_cast<std::uint64_t>(d) + n);
      AdmissibilityGrids g;
      for (int k = 0; k < 6; ++k) g.covariates.push_back(unit_ball(rng, d));
      g.outcome_grid = pm;
      g.predictions = Interval{-1.0, 1.0};
      std::vector<History> hs;
      for (int h = 0; h < vaw_histories; ++h) {
        History hist;
        for (int t = 0; t < n; ++t) {
          const double u = rng.uniform();
          const double y = u < 0.15 ? -1.0 : (u < 0.3 ? 1.0 : rng.uniform(-1, 1));
          hist.push_back({unit_ball(rng, d), y});
        }
        hs.push_back(std::move(hist));
      }
      const auto r = check_admissibility(vaw_oracle(d, 1.0, 1.0, n), sq, g, hs);
      const double m = summarize(r);
      vaw_round = std::min({vaw_round, r.worst_round_margin(),
                            r.worst_recipe_margin()});
      vaw_initial = std::min(vaw_initial, r.initial_margin);
      vaw_initial_failures += r.initial_margin < -tol ? 1 : 0;
      ++vaw_total;
      if (m < vaw_worst) {
        vaw_worst = m;
        vaw_where = format("d=%d n=%d: recursive %.4g, recipe %.4g, initial %.4g",
                           d, n, r.worst_round_margin(), r.worst_recipe_margin(),
                           r.initial_margin);
      }
    }
  }
  const double secs = seconds_since(t0);
  const double worst = std::min(experts_worst, vaw_worst);
  out.push_back(primary(
      "3", "admissibility margins (experts, VAW)", worst >= -tol, worst,
      format("experts worst %.4g [%s]; vaw worst %.4g [%s]; %.2fs", experts_worst,
             experts_where.c_str(), vaw_worst, vaw_where.c_str(), secs),
      secs));
  out.push_back(info("3", "VAW recursive and initial margins separately",
                     std::min(vaw_round, vaw_initial),
                     format("recursive/recipe worst %.4g; initial worst %.4g, "
                            "negative in %d of %d (d, n) batches",
                            vaw_round, vaw_initial, vaw_initial_failures,
                            vaw_total)));
  out.push_back(info("3", "experts relaxation at temperature 2B^2",
                     experts_wide_worst,
                     format("worst margin %.4g over the same histories",
                            experts_wide_worst)));

  // Unit-norm covariates: the log-determinant term can turn negative.
  {
    const int n = 6;
    History hist;
    for (int t = 0; t < n; ++t) {
      hist.push_back({Eigen::VectorXd::Constant(1, t % 2 ? 1.0 : -1.0), 1.0});
    }
    const RelaxationOracle rel = vaw_oracle(1, 1.0, 1.0, n);
    const double m = rel.evaluate(hist) + rel.comparator_loss(hist);
    out.push_back(info("3", "VAW initial condition with unit-norm covariates", m,
                       format("d=1 n=6 |x|=1: margin %.4f; holds iff "
                              "det(sum x x^T + lambda I) <= (n/d)^d", m)));
  }

  // The checker must flag a relaxation shifted down at the final round.
  {
    const int n = 3;
    RelaxationOracle broken = experts_oracle(families[2], 1.0, n);
    const RelaxationFn base = broken.evaluate;
    broken.name = "broken-experts";
    broken.evaluate = [base, n](std::span<const Observation> h) {
      return base(h) - (static_cast<int>(h.size()) == n ? 10.0 : 0.0);
    };
    const auto hs = enumerate_histories(xs, pm, n);
    const auto r = check_admissibility(broken, sq, grids, hs);
    const bool flagged = r.initial_margin < -tol;
    if (inject_broken) {
      out.push_back(primary("3", "injected broken relaxation", !flagged,
                            r.initial_margin,
                            format("initial-condition margin %.4g",
                                   r.initial_margin),
                            0.0));
    } else {
      out.push_back(info("3", "broken-relaxation fixture is flagged",
                         r.initial_margin,
                         format("initial-condition margin %.4g, flagged=%s",
                                r.initial_margin, flagged ? "yes" : "no")));
    }
  }
  return out;
}

std::vector<CheckResult> verify_finite_class_bound(VerifyLevel level) {
  const auto t0 = Clock::now();
  const bool full = level == VerifyLevel::kFull;
  const LossModel sq = LossModel::square(1.0);
  const ScalarFn gstar = [&sq](double s) { return gamma_star(sq, s); };
  double closed_err = 0.0;
  double excess = kInfinity;  // bound - E max, minimized
  std::string where;
  int instances = 0;
  for (double C : {0.5, 1.0, 2.0}) {
    for (std::uint64_t W : {2u, 4u, 16u}) {
      for (int n : {1, 8}) {
        const double b = finite_class_offset_bound(W, n, C, gstar);
        closed_err = std::max(closed_err,
                              std::abs(b - 2 * C * C * std::log(double(W))));
      }
    }
    const ScalarFn sqr = [](double x) { return x * x; };
    // Worst case over W: coordinate functions of value tuples, labelled
    // freely at every node.
    struct Shape {
      int k;
      std::vector<double> values;
      int max_n;
    };
    const std::vector<Shape> shapes = {
        {2, {-C, C}, full ? 8 : 5},
        {2, {-C, 0.0, C}, full ? 6 : 4},
        {4, {-C, C}, full ? 5 : 3},
    };
    for (const Shape& s : shapes) {
      const std::size_t v = s.values.size();
      std::size_t tuples = 1;
      for (int i = 0; i < s.k; ++i) tuples *= v;
      Eigen::MatrixXd table(s.k, tuples);
      for (std::size_t c = 0; c < tuples; ++c) {
        std::size_t code = c;
        for (int i = 0; i < s.k; ++i) {
          table(i, c) = s.values[code % v];
          code /= v;
        }
      }
      const ComparatorFamily fam = ComparatorFamily::finite_table(table);
      std::vector<CovariateId> xs(tuples);
      std::iota(xs.begin(), xs.end(), CovariateId{0});
      const std::vector<double> mu = {0.0};
      for (int n = 1; n <= s.max_n; ++n) {
        const double value = offset_rademacher_sup(fam, xs, mu, n, C, sqr);
        const double bound = 2 * C * C * std::log(double(s.k));
        if (bound - value < excess) {
          excess = bound - value;
          where = format("sup over W, C=%g |W|=%d n=%d: %.6f vs %.6f", C, s.k, n,
                         value, bound);
        }
        ++instances;
      }
    }
    // Random W with exact expectation over all 2^8 paths.
    PortableRng rng(0xC4000 + static_cast<std::uint64_t>(4 * C));
    const int n = 8;
    const CovariateTree x = identity_tree(n);
    const RealTree zero = RealTree::constant(n, 0.0);
    for (int k : {2, 4, 16}) {
      for (int rep = 0; rep < (full ? 20 : 5); ++rep) {
        const ComparatorFamily fam =
            random_table(rng, static_cast<std::size_t>(k), (1u << n) - 1, -2 * C, 2 * C);
        const double value = offset_rademacher(fam, x, zero, C, sqr);
        const double bound = 2 * C * C * std::log(double(k));
        if (bound - value < excess) {
          excess = bound - value;
          where = format("random W, C=%g |W|=%d: %.6f vs %.6f", C, k, value, bound);
        }
        ++instances;
      }
    }
  }
  const double secs = seconds_since(t0);
  const double margin = std::min(1e-6 - closed_err, excess);
  return {primary("4", "finite-class offset bound 2C^2 log|W|",
                  closed_err <= 1e-6 && excess >= -1e-12, margin,
                  format("closed-form error %.2e; %d exhaustive instances, "
                         "tightest %s; %.2fs",
                         closed_err, instances, where.c_str(), secs),
                  secs)};
}

std::vector<CheckResult> verify_minimax_sandwich(VerifyLevel) {
  const auto t0 = Clock::now();
  std::vector<CheckResult> out;
  double margin_a = kInfinity, margin_b = kInfinity, margin_c = kInfinity;
  double margin_b_quarter = kInfinity, margin_lower = kInfinity;
  std::string detail_a, detail_b, detail_c;
  int games_a = 0, games_b = 0, games_c = 0;
  const ScalarFn zero = [](double) { return 0.0; };
  for (const TinyGame& tg : tiny_games()) {
    const GameSpec& base = tg.game;
    const std::vector<double> mu0 = {0.0};
    if (tg.role == GameRole::kAbsolute) {
      ++games_a;
      for (int n = 1; n <= 3; ++n) {
        GameSpec g = base;
        g.horizon = n;
        const double V = minimax_value(g);
        const double tol = learner_grid_tolerance(g);
        const double rad = offset_rademacher_sup(g.family, g.covariates, mu0, n,
                                                 0.5, zero);
        // The learner grid only raises V, so the tolerance applies above.
        const double m = std::min(V - rad, 2 * rad + tol - V);
        if (m < margin_a) {
          margin_a = m;
          detail_a = format("%s n=%d: Rad %.4f V %.4f 2Rad %.4f tol %.3f",
                            tg.name.c_str(), n, rad, V, 2 * rad, tol);
        }
      }
      continue;
    }
    if (tg.role == GameRole::kTwoPoint) {
      ++games_b;
      const int n = fat_dimension(base.family.values(), tg.beta);
      GameSpec g = base;
      g.horizon = n;
      const double V = minimax_value(g);
      const double R = 2.0 * g.model.B();
      const double claimed = 0.5 * R * n * tg.beta;
      // Both grids push V up relative to the two-point game, so no
      // discretization allowance applies to a lower bound.
      const double m = V - claimed;
      if (m < margin_b) {
        margin_b = m;
        detail_b = format("%s: fat=%d V=%.4f vs (R/2) n beta=%.4f "
                          "(learner grid tol %.3f not applicable below)",
                          tg.name.c_str(), n, V, claimed,
                          learner_grid_tolerance(g));
      }
      margin_b_quarter = std::min(margin_b_quarter, V - 0.25 * R * n * tg.beta);
      // Offset lower bound with R, the exact residual x^2 and mu = 0.
      const ScalarFn upper_delta = [&g](double x) { return delta_upper(g.model, x); };
      const double lower = offset_rademacher_sup(g.family, g.covariates, mu0, n,
                                                 R / 2, upper_delta);
      margin_lower = std::min(margin_lower, V - lower);
    }
    ++games_c;
    for (int n = 1; n <= 3; ++n) {
      GameSpec g = base;
      g.horizon = n;
      const double V = minimax_value(g);
      const double tol = learner_grid_tolerance(g);
      const std::vector<double> mu = fine_grid(g.model.prediction_range(), 17);
      const ScalarFn lower_delta = [&g](double x) { return delta_lower(g.model, x); };
      const double U = offset_rademacher_sup(g.family, g.covariates, mu, n,
                                             g.model.grad_bound(), lower_delta);
      const double m = U + tol - V;
      if (m < margin_c) {
        margin_c = m;
        detail_c = format("%s n=%d: V %.4f U %.4f tol %.3f", tg.name.c_str(), n,
                          V, U, tol);
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = margin_a >= -1e-9 && margin_b >= -1e-9 && margin_c >= -1e-9 &&
                  games_a + games_b + games_c >= 5 && secs < 120.0;
  out.push_back(primary(
      "5", "minimax sandwiches", ok, std::min({margin_a, margin_b, margin_c}),
      format("(a) %d games, worst %.4g; (b) %d games, worst %.4g; (c) %d games, "
             "worst %.4g; %.2fs",
             games_a, margin_a, games_b, margin_b, games_c, margin_c, secs),
      secs));
  out.push_back(info("5a", "Rad <= V <= 2 Rad (absolute loss)", margin_a, detail_a));
  out.push_back(info("5b", "V_n >= (R/2) n beta at n = fat_beta", margin_b, detail_b));
  out.push_back(info("5b", "V_n >= (R/4) n beta at n = fat_beta", margin_b_quarter,
                     format("worst slack %.4f", margin_b_quarter)));
  out.push_back(info("5b", "two-point offset lower bound <= V", margin_lower,
                     format("worst slack %.4g", margin_lower)));
  out.push_back(info("5c", "offset upper bound dominates V", margin_c, detail_c));
  return out;
}

std::vector<CheckResult> verify_value_monotonicity(VerifyLevel) {
  const auto t0 = Clock::now();
  double worst = kInfinity;
  std::string where;
  int games = 0;
  const std::vector<int> horizons = {0, 1, 2, 3};
  for (const TinyGame& tg : tiny_games()) {
    const std::vector<double> v = value_monotonicity(tg.game, horizons);
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] - v[i - 1] < worst) {
        worst = v[i] - v[i - 1];
        where = format("%s: V_%zu=%.4f V_%zu=%.4f", tg.name.c_str(), i - 1,
                       v[i - 1], i, v[i]);
      }
    }
    ++games;
  }
  const double secs = seconds_since(t0);
  return {primary("6", "V_n nondecreasing for n = 0..3", worst >= -1e-12, worst,
                  format("%d games, smallest increment %.4g (%s)", games, worst,
                         where.c_str()),
                  secs)};
}

std::vector<CheckResult> verify_combinatorics(VerifyLevel level) {
  const auto t0 = Clock::now();
  const bool full = level == VerifyLevel::kFull;
  const std::vector<double> betas = {0.5, 1.0};
  CombinatoricsRunner runner(betas);
  CombinatoricsTally tally;
  std::uint64_t sampled = 0;

  for (int num_x = 1; num_x <= (full ? 3 : 2); ++num_x) {
    const Eigen::MatrixXd fns = all_functions(num_x);
    const int m = static_cast<int>(fns.rows());
    // Families: subsets of 1..4 distinct functions.
    std::vector<std::vector<int>> families;
    for (int k = 1; k <= 4 && k <= m; ++k) {
      std::vector<int> idx(static_cast<std::size_t>(k));
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        families.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    const int max_n = (num_x <= 2 && full) ? 3 : 2;
    for (const auto& fam : families) {
      Eigen::MatrixXd table(fam.size(), num_x);
      for (std::size_t r = 0; r < fam.size(); ++r) table.row(r) = fns.row(fam[r]);
      std::vector<int> fats;
      for (double b : betas) fats.push_back(fat_dimension(table, b));
      for (int n = 1; n <= max_n; ++n) {
        const std::size_t nodes = (std::size_t{1} << n) - 1;
        std::size_t trees = 1;
        for (std::size_t j = 0; j < nodes; ++j) trees *= num_x;
        std::vector<std::size_t> labels(nodes);
        for (std::size_t code = 0; code < trees; ++code) {
          std::size_t c = code;
          for (std::size_t j = 0; j < nodes; ++j) {
            labels[j] = c % num_x;
            c /= num_x;
          }
          runner.check(table, labels, n, fats, tally);
        }
      }
    }
  }
  if (full) {
    // Depth 3 over three covariates: a seeded sample of (family, tree) pairs.
    PortableRng rng(0xC7000);
    const Eigen::MatrixXd fns = all_functions(3);
    for (int s = 0; s < 4000; ++s) {
      const int k = 1 + static_cast<int>(rng.below(4));
      std::vector<int> idx;
      while (static_cast<int>(idx.size()) < k) {
        const int f = static_cast<int>(rng.below(fns.rows()));
        if (std::find(idx.begin(), idx.end(), f) == idx.end()) idx.push_back(f);
      }
      Eigen::MatrixXd table(k, 3);
      for (int r = 0; r < k; ++r) table.row(r) = fns.row(idx[r]);
      std::vector<int> fats;
      for (double b : betas) fats.push_back(fat_dimension(table, b));
      std::vector<std::size_t> labels(7);
      for (auto& l : labels) l = rng.below(3);
      runner.check(table, labels, 3, fats, tally);
      ++sampled;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = tally.failures_cover == 0 && tally.failures_fat == 0 &&
                  tally.failures_dudley == 0;
  std::vector<CheckResult> out;
  out.push_back(primary(
      "7", "N2 <= Ninf, Ninf(2b) <= (2en/b)^fat_b, Dudley >= Rad", ok,
      std::min({tally.margin_cover, tally.margin_fat, tally.margin_dudley}),
      format("%llu instances (%llu distinct), failures %llu/%llu/%llu%s%s; %.2fs",
             static_cast<unsigned long long>(tally.instances),
             static_cast<unsigned long long>(tally.unique),
             static_cast<unsigned long long>(tally.failures_cover),
             static_cast<unsigned long long>(tally.failures_fat),
             static_cast<unsigned long long>(tally.failures_dudley),
             tally.first_failure.empty() ? "" : "; first: ",
             tally.first_failure.c_str(), secs),
      secs));
  out.push_back(info(
      "7", "scope",
      0.0,
      full ? format("exhaustive for |X| <= 3 at n <= 2 and |X| <= 2 at n = 3; "
                    "%llu sampled pairs at |X| = 3, n = 3; beta in {0.5, 1}",
                    static_cast<unsigned long long>(sampled))
           : std::string("exhaustive for |X| <= 2, n <= 2; beta in {0.5, 1}")));
  return out;
}

std::vector<CheckResult> verify_khinchine(VerifyLevel) {
  const auto t0 = Clock::now();
  double worst = kInfinity;
  int worst_k = 0;
  bool ok = true;
  for (int k = 1; k <= 24; ++k) {
    const KhinchineResult r = khinchine_check(k);
    const double m = r.mean_abs_sum - std::sqrt(0.5 * k);
    ok = ok && r.holds;
    if (m < worst) {
      worst = m;
      worst_k = k;
    }
  }
  const double secs = seconds_since(t0);
  return {primary("8", "E|sum eps| >= sqrt(k/2), k <= 24", ok, worst,
                  format("tightest at k=%d, slack %.6f", worst_k, worst), secs)};
}

std::vector<CheckResult> verify_rates(VerifyLevel) {
  const auto t0 = Clock::now();
  const double n1 = 1e6, n2 = 1e9;
  RateConstants k;
  k.c_family = 1e6;  // keeps the curvature branch active at these n
  auto slope = [&](auto&& fn, double log_power) {
    const double a = std::log(fn(static_cast<int>(n1))) -
                     log_power * std::log(std::log(n1));
    const double b = std::log(fn(static_cast<int>(n2))) -
                     log_power * std::log(std::log(n2));
    return (b - a) / (std::log(n2) - std::log(n1));
  };
  double worst = 0.0;
  std::string where;
  for (double p : {0.5, 1.0, 1.5, 3.0, 4.0}) {
    for (double r : {2.0, 3.0, 4.0}) {
      const double K = 1.0;
      const double su = slope([&](int n) { return rate_upper(p, r, 1.0, K, n, k); },
                              rate_upper_log_power(p, K));
      const double sl = slope([&](int n) { return rate_lower(p, r, 1.0, K, n, k); }, 0.0);
      const double err = std::max({std::abs(su - sl),
                                   std::abs(su - rate_upper_exponent(p, r, K)),
                                   std::abs(sl - rate_lower_exponent(p, r, K))});
      if (err > worst) {
        worst = err;
        where = format("p=%g r=%g: upper %.6f lower %.6f", p, r, su, sl);
      }
    }
  }
  // Phase transition: both branches meet at -1/2.
  const double d = 1e-9;
  const double su2 = slope([&](int n) { return rate_upper(2.0, 2.0, 1.0, 1.0, n, k); },
                           rate_upper_log_power(2.0, 1.0));
  const double sl2 = slope([&](int n) { return rate_lower(2.0, 2.0, 1.0, 1.0, n, k); }, 0.0);
  const double phase = std::max(
      {std::abs(su2 + 0.5), std::abs(sl2 + 0.5),
       std::abs(rate_upper_exponent(2.0 - d, 2.0, 0.0) + 0.5),
       std::abs(rate_upper_exponent(2.0 + d, 2.0, 1.0) + 0.5),
       std::abs(rate_lower_exponent(2.0 - d, 2.0, 0.0) + 0.5),
       std::abs(rate_lower_exponent(2.0 + d, 2.0, 1.0) + 0.5)});
  const double sparse = sparse_cover_bound(8, 2, 0.5);
  const double sparse_err = std::abs(sparse - 6.164);
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-6 && phase <= 1e-6 && sparse_err <= 1e-3;
  std::vector<CheckResult> out;
  out.push_back(primary(
      "9", "rate exponents, phase transition, sparse bound", ok,
      std::min({1e-6 - worst, 1e-6 - phase, 1e-3 - sparse_err}),
      format("exponent mismatch %.2e (%s); phase %.2e; sparse(8,2,0.5) = %.6f "
             "vs 6.164",
             worst, where.c_str(), phase, sparse),
      secs));
  out.push_back(info("9", "sparse entropy s log(eM/s) + s log(1/beta)",
                     1e-3 - sparse_err,
                     format("2 log(4e) + 2 log 2 = %.6f; |diff| %.6f", sparse,
                            sparse_err)));
  return out;
}

std::vector<CheckResult> verify_offset_collapse(VerifyLevel level) {
  const auto t0 = Clock::now();
  PortableRng rng(0xCA000);
  const ScalarFn zero = [](double) { return 0.0; };
  double worst = 0.0;
  const int count = level == VerifyLevel::kFull ? 200 : 50;
  for (int i = 0; i < count; ++i) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const std::size_t k = 1 + rng.below(4);
    const ComparatorFamily fam = random_table(rng, k, 3, -1.0, 1.0);
    const CovariateTree x = CovariateTree::generate(
        n, [&](int, std::uint64_t) { return rng.below(3); });
    const RealTree mu = RealTree::generate(
        n, [&](int, std::uint64_t) { return rng.uniform(-1.0, 1.0); });
    const double C = rng.uniform(0.1, 3.0);
    const double a = offset_rademacher(fam, x, mu, C, zero);
    const double b = 2 * C * seq_rademacher(fam, x);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
  }
  const double secs = seconds_since(t0);
  return {primary("10", "zero offset equals 2C Rad", worst <= 1e-12,
                  1e-12 - worst,
                  format("%d instances, largest relative gap %.2e", count, worst),
                  secs)};
}

std::vector<CheckResult> run_suite(const SuiteOptions& options) {
  using Fn = std::function<std::vector<CheckResult>()>;
  const VerifyLevel lv = options.level;
  const std::vector<std::pair<std::string, Fn>> all = {
      {"1", [&] { return verify_experts_regret(lv); }},
      {"2", [&] { return verify_vaw_regret(lv); }},
      {"3", [&] { return verify_admissibility(lv, options.inject_broken_relaxation); }},
      {"4", [&] { return verify_finite_class_bound(lv); }},
      {"5", [&] { return verify_minimax_sandwich(lv); }},
      {"6", [&] { return verify_value_monotonicity(lv); }},
      {"7", [&] { return verify_combinatorics(lv); }},
      {"8", [&] { return verify_khinchine(lv); }},
      {"9", [&] { return verify_rates(lv); }},
      {"10", [&] { return verify_offset_collapse(lv); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [id, fn] : all) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) ==
            options.only.end()) {
      continue;
    }
    try {
      for (CheckResult& r : fn()) out.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.push_back(primary(id, "criterion raised an error", false, -kInfinity,
                            e.what(), 0.0));
    }
  }
  return out;
}

bool all_passed(std::span<const CheckResult> results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) {
    return r.informational || r.passed;
  });
}

std::string format_results(std::span<const CheckResult> results) {
  std::string text;
  for (const CheckResult& r : results) {
    const char* status = r.informational ? "info" : (r.passed ? "PASS" : "FAIL");
    text += format("%-4s %-4s %-52s margin %+.4e  ", status, r.id.c_str(),
                   r.title.c_str(), r.margin);
    text += r.detail;
    text += '\n';
  }
  return text;
}

}  // namespace seqreg
