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

#include "seqreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <openssl/evp.h>

#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"
#include "seqreg/rng.hpp"
#include "seqreg/svg.hpp"

namespace seqreg {
namespace {

bool wants(const OutputConfig& out, const std::string& format) {
  return std::find(out.formats.begin(), out.formats.end(), format) !=
         out.formats.end();
}

// Uniform draw from the unit ball of R^d.
Eigen::VectorXd unit_ball_point(PortableRng& rng, int d) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  const double norm = v.norm();
  if (norm == 0.0) return v;
  return v * (std::pow(rng.uniform(), 1.0 / d) / norm);
}

std::vector<Observation> iid_sequence(const ExperimentConfig& c,
                                      const LossModel& model) {
  PortableRng rng(c.seed);
  const GeneratorConfig& g = c.generator;
  const double B = model.B();
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(c.horizon));
  if (c.family.kind() == FamilyKind::kLinear) {
    const int d = c.family.dimension();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    if (!g.weights.empty()) {
      if (static_cast<int>(g.weights.size()) != d) {
        throw ConfigError("generator.weights: expected " + std::to_string(d) +
                          " entries");
      }
      for (int i = 0; i < d; ++i) w(i) = g.weights[static_cast<std::size_t>(i)];
    }
    for (int t = 0; t < c.horizon; ++t) {
      Eigen::VectorXd x = unit_ball_point(rng, d);
      const double y = clip(w.dot(x) + g.noise * rng.normal(), B);
      out.push_back({std::move(x), y});
    }
    return out;
  }
  if (!c.family.is_finite()) {
    throw ConfigError("iid_noise: unsupported family kind");
  }
  if (g.expert >= c.family.size()) {
    throw ConfigError("generator.expert: row " + std::to_string(g.expert) +
                      " outside the family");
  }
  for (int t = 0; t < c.horizon; ++t) {
    const CovariateId x = rng.below(c.family.num_covariates());
    const double y = clip(c.family.value(g.expert, x) + g.noise * rng.normal(), B);
    out.push_back({x, y});
  }
  return out;
}

std::vector<Observation> adversarial_sequence(const ExperimentConfig& c) {
  const GeneratorConfig& g = c.generator;
  if (!g.game) throw ConfigError("adversarial_oracle: missing game");
  if (g.game->horizon < 1) throw ConfigError("adversarial_oracle: empty game");
  auto solver = std::make_shared<MinimaxSolver>(*g.game);
  OptimalAdversary adversary(solver);
  std::unique_ptr<Forecaster> forecaster = build_forecaster(c);
  const Interval range = g.game->model.prediction_range();
  std::vector<Observation> out;
  std::vector<PlayedRound> block;
  for (int t = 0; t < c.horizon; ++t) {
    if (static_cast<int>(block.size()) == g.game->horizon) block.clear();
    const CovariateId x = adversary.choose_covariate(block);
    const double yhat =
        std::clamp(forecaster->predict(Covariate{x}), range.lo, range.hi);
    const double y = adversary.choose_outcome(block, x, yhat);
    forecaster->observe(Covariate{x}, y);
    block.push_back({x, yhat, y});
    out.push_back({x, y});
  }
  return out;
}

std::vector<Observation> shattering_sequence(const ExperimentConfig& c,
                                             const LossModel& model) {
  const GeneratorConfig& g = c.generator;
  ShatterCertificate cert;
  if (g.certificate) {
    cert = *g.certificate;
  } else {
    if (!c.family.is_finite()) {
      throw ConfigError("shattering_adversary: finite family required");
    }
    std::vector<CovariateId> xs(c.family.num_covariates());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i;
    const int depth_cap = std::clamp(c.horizon, 1, 12);
    FatShatteringResult fat = fat_shattering(c.family, xs, g.beta, depth_cap);
    if (!fat.certificate) {
      throw ConfigError("shattering_adversary: no shattered tree at scale " +
                        std::to_string(g.beta));
    }
    cert = std::move(*fat.certificate);
  }
  if (cert.depth < 1) {
    throw ConfigError("shattering_adversary: certificate has depth 0");
  }
  PortableRng rng(c.seed);
  std::vector<Observation> out;
  std::uint64_t node = 0;
  for (int t = 0; t < c.horizon; ++t) {
    const int level = t % cert.depth + 1;
    if (level == 1) node = 0;
    const CovariateId x = cert.covariate_tree.node(level, node);
    const TwoPointWitness w = two_point_witness(model, cert.witness.node(level, node));
    const int eps = rng.sign();
    const double hi = std::max(w.y_plus, w.y_minus);
    const double lo = std::min(w.y_plus, w.y_minus);
    out.push_back({x, eps > 0 ? hi : lo});
    node = (node << 1) | (eps > 0 ? 1u : 0u);
  }
  return out;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  return Json(v).dump();
}

}  // namespace

ExperimentConfig experiment_config_from_json(
    const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config must be an object");
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    c.horizon = j.value("horizon", 0);
    if (c.horizon < 0) throw ConfigError("horizon must be nonnegative");
    if (j.contains("loss")) c.loss = loss_config_from_json(j.at("loss"));
    if (!j.contains("family")) throw ConfigError("missing field \"family\"");
    c.family = family_from_json(j.at("family"), base_dir);

    const Json fj = j.value("forecaster", Json::object());
    c.forecaster.kind = fj.value("kind", std::string("experts"));
    c.forecaster.temperature = fj.value("temperature", 0.0);
    c.forecaster.lambda = fj.value("lambda", 1.0);
    c.forecaster.relaxation = fj.value("relaxation", std::string("experts"));
    c.forecaster.comparator = fj.value("comparator", std::size_t{0});

    const Json gj = j.value("generator", Json::object());
    c.generator.kind = gj.value("kind", std::string("iid_noise"));
    c.generator.expert = gj.value("expert", std::size_t{0});
    c.generator.weights = gj.value("weights", std::vector<double>{});
    c.generator.noise = gj.value("noise", 0.0);
    c.generator.beta = gj.value("beta", 1.0);
    if (gj.contains("game")) {
      c.generator.game = game_from_json(gj.at("game"), base_dir);
    }
    if (gj.contains("certificate")) {
      c.generator.certificate = certificate_from_json(gj.at("certificate"));
    }
    if (gj.contains("file")) {
      std::filesystem::path p = gj.at("file").get<std::string>();
      c.generator.file = p.is_relative() ? base_dir / p : p;
    }

    const Json oj = j.value("output", Json::object());
    if (oj.contains("directory")) {
      std::filesystem::path p = oj.at("directory").get<std::string>();
      c.output.directory = p.is_relative() ? base_dir / p : p;
    }
    if (oj.contains("formats")) {
      c.output.formats = oj.at("formats").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

std::unique_ptr<Forecaster> build_forecaster(const ExperimentConfig& c) {
  const LossModel model = LossModel::from_config(c.loss);
  const ForecasterConfig& f = c.forecaster;
  if (f.kind == "experts") {
    return make_experts_forecaster(c.family, model.B(), f.temperature);
  }
  if (f.kind == "vaw") {
    if (c.family.kind() != FamilyKind::kLinear) {
      throw ConfigError("vaw forecaster needs a linear family");
    }
    return make_vaw_forecaster(c.family.dimension(), f.lambda, model.B());
  }
  if (f.kind == "relaxation") {
    const int n = std::max(c.horizon, 1);
    RelaxationOracle rel;
    if (f.relaxation == "experts") {
      rel = experts_oracle(c.family, model.B(), n, f.temperature);
    } else if (f.relaxation == "vaw") {
      rel = vaw_oracle(c.family.dimension(), f.lambda, model.B(), n);
    } else {
      throw ConfigError("unknown relaxation \"" + f.relaxation + "\"");
    }
    return make_relaxation_forecaster(
        std::move(rel), model, model.prediction_range(),
        std::vector<double>{-model.B(), model.B()});
  }
  if (f.kind == "comparator") {
    return make_comparator_forecaster(c.family, PredictorHandle{f.comparator});
  }
  throw ConfigError("unknown forecaster kind \"" + f.kind + "\"");
}

std::vector<Observation> generate_sequence(const ExperimentConfig& c) {
  const LossModel model = LossModel::from_config(c.loss);
  const std::string& kind = c.generator.kind;
  if (kind == "iid_noise") return iid_sequence(c, model);
  if (kind == "adversarial_oracle") return adversarial_sequence(c);
  if (kind == "shattering_adversary") return shattering_sequence(c, model);
  if (kind == "replay") {
    if (c.generator.file.empty()) throw ConfigError("replay: missing file");
    std::vector<Observation> seq = read_sequence(c.generator.file);
    if (c.horizon > 0) {
      if (static_cast<int>(seq.size()) < c.horizon) {
        throw ConfigError("replay: " + c.generator.file.string() + " holds " +
                          std::to_string(seq.size()) + " rounds, fewer than " +
                          std::to_string(c.horizon));
      }
      seq.resize(static_cast<std::size_t>(c.horizon));
    }
    return seq;
  }
  throw ConfigError("unknown generator kind \"" + kind + "\"");
}

std::string rounds_jsonl(std::span<const RoundRecord> records) {
  std::string text;
  for (const RoundRecord& r : records) {
    text += to_json(r).dump();
    text += '\n';
  }
  return text;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  const LossModel model = LossModel::from_config(c.loss);
  ExperimentResult res;
  res.sequence = generate_sequence(c);

  const std::string& kind = c.forecaster.kind;
  const bool vaw = kind == "vaw" ||
                   (kind == "relaxation" && c.forecaster.relaxation == "vaw");
  // The VAW guarantee compares against the lambda/2 penalized least squares.
  res.comparator_ridge = vaw ? c.forecaster.lambda / 2.0 : 0.0;

  std::unique_ptr<Forecaster> forecaster = build_forecaster(c);
  res.run = run_online(*forecaster, res.sequence, model, c.family,
                       res.comparator_ridge);

  const double B = model.B();
  if (kind == "experts" ||
      (kind == "relaxation" && c.forecaster.relaxation == "experts")) {
    const double tau = c.forecaster.temperature > 0 ? c.forecaster.temperature
                                                    : B * B;
    res.bound = tau * std::log(static_cast<double>(c.family.size()));
  } else if (vaw && c.horizon >= c.forecaster.lambda * c.family.dimension()) {
    res.bound = regret_bound(BoundKind::kVaw,
                             {B, 0, c.horizon, c.family.dimension(),
                              c.forecaster.lambda});
  }
  res.bound_satisfied = !res.bound || res.run.final_regret <= *res.bound + 1e-9;

  const std::string log = rounds_jsonl(res.run.records);
  res.log_sha256 = sha256_hex(log);
  res.summary = Json{{"final_regret", res.run.final_regret},
                     {"bound", res.bound ? Json(*res.bound) : Json(nullptr)},
                     {"bound_satisfied", res.bound_satisfied},
                     {"horizon", c.horizon},
                     {"learner_loss", res.run.learner_loss},
                     {"comparator_loss", res.run.comparator_loss},
                     {"comparator_ridge", res.comparator_ridge},
                     {"forecaster", forecaster->name()},
                     {"generator", c.generator.kind},
                     {"rng", std::string(PortableRng::kAlgorithm)},
                     {"seed", c.seed},
                     {"log_sha256", res.log_sha256}};

  if (c.output.directory.empty()) return res;
  std::error_code ec;
  std::filesystem::create_directories(c.output.directory, ec);
  if (ec) {
    throw IoError("cannot create " + c.output.directory.string() + ": " +
                  ec.message());
  }
  const auto& dir = c.output.directory;
  write_text_file(dir / "rounds.jsonl", log);
  write_text_file(dir / "summary.json", res.summary.dump(2) + "\n");
  if (wants(c.output, "csv") || wants(c.output, "svg")) {
    const double bound = res.bound.value_or(kInfinity);
    if (wants(c.output, "csv")) {
      std::string csv = "t,cumulative_regret,bound\n";
      for (const RoundRecord& r : res.run.records) {
        csv += std::to_string(r.t) + "," + csv_number(r.cumulative_regret) +
               "," + csv_number(bound) + "\n";
      }
      write_text_file(dir / "regret.csv", csv);
    }
    if (wants(c.output, "svg")) {
      std::vector<double> t;
      PlotSeries regret{"regret", {}, "#1f77b4"};
      PlotSeries limit{"bound", {}, "#d62728"};
      for (const RoundRecord& r : res.run.records) {
        t.push_back(r.t);
        regret.values.push_back(r.cumulative_regret);
        limit.values.push_back(bound);
      }
      const std::vector<PlotSeries> series = {regret, limit};
      write_text_file(dir / "regret.svg",
                      svg_line_plot(t, series, forecaster->name() + " regret",
                                    "round", "cumulative regret"));
    }
  }
  return res;
}

}  // namespace seqreg
