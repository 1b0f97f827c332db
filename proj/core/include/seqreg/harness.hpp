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

#ifndef SEQREG_HARNESS_HPP_
#define SEQREG_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqreg/comparators.hpp"
#include "seqreg/complexity.hpp"
#include "seqreg/forecasters.hpp"
#include "seqreg/io.hpp"
#include "seqreg/losses.hpp"
#include "seqreg/minimax.hpp"

namespace seqreg {

struct ForecasterConfig {
  std::string kind = "experts";  // experts | vaw | relaxation | comparator
  double temperature = 0.0;      // experts; nonpositive selects B^2
  double lambda = 1.0;           // vaw
  std::string relaxation = "experts";  // relaxation: experts | vaw
  std::size_t comparator = 0;          // comparator: row of a finite family
};

struct GeneratorConfig {
  // iid_noise | adversarial_oracle | shattering_adversary | replay
  std::string kind = "iid_noise";
  std::size_t expert = 0;        // iid_noise, finite families
  std::vector<double> weights;   // iid_noise, linear families
  double noise = 0.0;            // iid_noise
  std::optional<GameSpec> game;  // adversarial_oracle
  double beta = 1.0;             // shattering_adversary
  std::optional<ShatterCertificate> certificate;  // shattering_adversary
  std::filesystem::path file;                     // replay
};

struct OutputConfig {
  std::filesystem::path directory;  // empty: nothing is written
  std::vector<std::string> formats = {"json", "csv"};  // plus "svg"
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  LossConfig loss;
  ComparatorFamily family = ComparatorFamily::constants(std::vector<double>{0.0});
  ForecasterConfig forecaster;
  GeneratorConfig generator;
  int horizon = 0;
  OutputConfig output;
};

// Relative paths resolve against base_dir.
ExperimentConfig experiment_config_from_json(
    const Json& j, const std::filesystem::path& base_dir = {});

std::unique_ptr<Forecaster> build_forecaster(const ExperimentConfig& config);

// Deterministic given the seed. The adversarial generator plays against
// the configured forecaster, restarting the game every game.horizon rounds.
std::vector<Observation> generate_sequence(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<Observation> sequence;
  RunResult run;
  std::optional<double> bound;
  bool bound_satisfied = true;
  double comparator_ridge = 0.0;
  std::string log_sha256;
  Json summary;
};

// Plays the experiment and, when an output directory is set, writes
// rounds.jsonl, summary.json, regret.csv and regret.svg per the formats.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string rounds_jsonl(std::span<const RoundRecord> records);
std::string sha256_hex(const std::string& data);

}  // namespace seqreg

#endif  // SEQREG_HARNESS_HPP_
