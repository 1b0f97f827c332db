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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/harness.hpp"
#include "seqreg/io.hpp"
#include "seqreg/svg.hpp"

using namespace seqreg;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seqreg_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig experts_config(int n) {
  const Json j = Json::parse(R"({
    "seed": 42, "horizon": 0,
    "loss": {"name": "square", "B": 1.0},
    "family": {"kind": "finite_table",
               "values": [[0.9, -0.2], [-0.5, 0.1], [0.0, 0.3]]},
    "forecaster": {"kind": "experts"},
    "generator": {"kind": "iid_noise", "expert": 2, "noise": 0.2}
  })");
  ExperimentConfig c = experiment_config_from_json(j);
  c.horizon = n;
  return c;
}

}  // namespace

TEST_CASE("sha256 of a known message") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("iid noise of zero replays the expert") {
  ExperimentConfig c = experts_config(30);
  c.generator.noise = 0.0;
  for (const Observation& o : generate_sequence(c)) {
    CHECK(o.y == c.family.value(2, std::get<CovariateId>(o.x)));
  }
}

TEST_CASE("replay reproduces a saved sequence") {
  const fs::path dir = scratch("replay");
  const ExperimentConfig c = experts_config(25);
  const auto seq = generate_sequence(c);
  write_sequence(dir / "seq.jsonl", seq);
  ExperimentConfig r = c;
  r.generator.kind = "replay";
  r.generator.file = dir / "seq.jsonl";
  const auto back = generate_sequence(r);
  REQUIRE(back.size() == seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(std::get<CovariateId>(back[i].x) == std::get<CovariateId>(seq[i].x));
    CHECK(back[i].y == seq[i].y);
  }
}

TEST_CASE("shattering adversary follows the certificate") {
  ExperimentConfig c;
  c.seed = 9;
  c.loss.name = "square";
  c.loss.B = 2.0;
  c.family = ComparatorFamily::constants(std::vector<double>{1.0, -1.0}, 1);
  c.horizon = 12;
  c.generator.kind = "shattering_adversary";
  c.generator.beta = 2.0;
  for (const Observation& o : generate_sequence(c)) {
    CHECK(std::get<CovariateId>(o.x) == 0);
    CHECK((o.y == 2.0 || o.y == -2.0));
  }
  c.family = ComparatorFamily::constants(std::vector<double>{0.0}, 1);
  CHECK_THROWS_AS(generate_sequence(c), ConfigError);
}

TEST_CASE("experiment bundle") {
  const fs::path dir = scratch("bundle");
  ExperimentConfig c = experts_config(200);
  c.output.directory = dir;
  c.output.formats = {"json", "csv", "svg"};
  const ExperimentResult a = run_experiment(c);
  CHECK(a.bound_satisfied);
  CHECK(a.summary["final_regret"].get<double>() == a.run.records.back().cumulative_regret);
  CHECK(a.summary["rng"] == "mt19937_64");
  for (const char* f : {"rounds.jsonl", "summary.json", "regret.csv", "regret.svg"}) {
    CHECK(fs::exists(dir / f));
  }
  std::ifstream log(dir / "rounds.jsonl");
  std::stringstream text;
  text << log.rdbuf();
  CHECK(sha256_hex(text.str()) == a.log_sha256);

  const ExperimentResult b = run_experiment(c);
  CHECK(a.log_sha256 == b.log_sha256);

  ExperimentConfig empty = experts_config(0);
  const ExperimentResult e = run_experiment(empty);
  CHECK(e.run.records.empty());
  CHECK(e.run.final_regret == 0.0);
  CHECK(rounds_jsonl(e.run.records).empty());
}

TEST_CASE("VAW experiment compares against the half-penalized ridge") {
  const Json j = Json::parse(R"({
    "seed": 5, "horizon": 300,
    "loss": {"name": "square", "B": 1.0},
    "family": {"kind": "linear", "dimension": 2},
    "forecaster": {"kind": "vaw", "lambda": 1.0},
    "generator": {"kind": "iid_noise", "weights": [0.4, -0.3], "noise": 0.1}
  })");
  const ExperimentResult r = run_experiment(experiment_config_from_json(j));
  CHECK(r.comparator_ridge == 0.5);
  REQUIRE(r.bound);
  CHECK(*r.bound == Approx(8 * std::log(150.0)));
  CHECK(r.bound_satisfied);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(experiment_config_from_json(Json::parse("[]")), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json(Json::parse(R"({"horizon": 3})")), ConfigError);
  CHECK_THROWS_AS(family_from_json(Json::parse(R"({"kind": "spline"})")), ConfigError);
  ExperimentConfig c = experts_config(3);
  c.generator.kind = "adversarial_oracle";
  CHECK_THROWS_AS(generate_sequence(c), ConfigError);
  c.generator.kind = "martian";
  CHECK_THROWS_AS(generate_sequence(c), ConfigError);
  c = experts_config(3);
  c.forecaster.kind = "vaw";
  CHECK_THROWS_AS(build_forecaster(c), ConfigError);
}

TEST_CASE("serialization round trips") {
  const Json fam = Json::parse(R"({"kind": "finite_table", "values": [[1, -1], [0, 0.5]]})");
  const ComparatorFamily F = family_from_json(fam);
  CHECK(F.value(1, 1) == 0.5);
  CHECK(family_from_json(to_json(F)).values() == F.values());

  std::stringstream csv;
  write_family_csv(csv, F);
  CHECK(family_from_csv(csv).values() == F.values());

  const CovariateTree x(Levels<CovariateId>{{1}, {0, 1}});
  CHECK(covariate_tree_from_json(to_json(x)) == x);
  const RealTree r(Levels<double>{{0.5}, {-1.0, 2.0}});
  CHECK(real_tree_from_json(to_json(r)) == r);

  const Json game = Json::parse(R"({
    "family": {"kind": "constants", "levels": [-1, 1], "num_covariates": 1},
    "loss": {"name": "absolute", "B": 1},
    "horizon": 2, "outcome_grid": [-1, 1], "prediction_grid": [-1, 0, 1]})");
  const GameSpec g = game_from_json(game);
  CHECK(to_json(game_from_json(to_json(g))) == to_json(g));

  const std::vector<CovariateId> x0 = {0};
  const auto cert = fat_shattering(g.family, x0, 2.0, 2).certificate;
  REQUIRE(cert);
  const ShatterCertificate back = certificate_from_json(to_json(*cert));
  CHECK(verify_shatter_certificate(g.family, back, 2.0));

  const Covariate v = Eigen::VectorXd(Eigen::Vector2d(0.25, -1.5));
  CHECK(std::get<Eigen::VectorXd>(covariate_from_json(to_json(v))) ==
        std::get<Eigen::VectorXd>(v));
}

TEST_CASE("strategy export covers every response") {
  const Json game = Json::parse(R"({
    "family": {"kind": "constants", "levels": [-1, 1], "num_covariates": 1},
    "loss": {"name": "absolute", "B": 1},
    "horizon": 1, "outcome_grid": [-1, 1], "prediction_grid": [-1, 0, 1]})");
  MinimaxSolver s(game_from_json(game));
  const Json tree = export_strategy(s);
  CHECK(tree["value"].get<double>() == Approx(1.0));
  REQUIRE(tree.contains("strategy"));
  CHECK(tree["strategy"]["responses"].size() == 3);
}

TEST_CASE("svg plot") {
  const std::vector<double> t = {1, 2, 3};
  const std::vector<PlotSeries> s = {{"a", {0.0, 1.0, 0.5}, "#000000"}};
  const std::string svg = svg_line_plot(t, s, "title & more", "x", "y");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("title &amp; more") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
