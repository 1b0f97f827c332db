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

#ifndef SEQREG_IO_HPP_
#define SEQREG_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqreg/comparators.hpp"
#include "seqreg/complexity.hpp"
#include "seqreg/forecasters.hpp"
#include "seqreg/losses.hpp"
#include "seqreg/minimax.hpp"
#include "seqreg/trees.hpp"

namespace seqreg {

using Json = nlohmann::json;

// Malformed documents raise ConfigError naming the offending field.
LossConfig loss_config_from_json(const Json& j);
Json to_json(const LossConfig& config);

// {"kind": "finite_table", "values": [[...]] | "csv": path, ...},
// {"kind": "constants", "levels": [...], "num_covariates": k},
// {"kind": "linear", "dimension": d, "weight_norm_bound": w},
// {"kind": "sparse_convex", "base": [[...]], "sparsity": s}.
// Relative csv paths resolve against base_dir.
ComparatorFamily family_from_json(const Json& j,
                                  const std::filesystem::path& base_dir = {});
Json to_json(const ComparatorFamily& family);

// Header row of covariate ids, then one row of values per predictor.
ComparatorFamily family_from_csv(std::istream& in);
void write_family_csv(std::ostream& out, const ComparatorFamily& family);

// {"depth": n, "levels": [[root], [l, r], ...]}.
RealTree real_tree_from_json(const Json& j);
CovariateTree covariate_tree_from_json(const Json& j);
Json to_json(const RealTree& tree);
Json to_json(const CovariateTree& tree);

// {"family", "loss", "horizon", "covariates", "outcome_grid",
//  "prediction_grid"}.
GameSpec game_from_json(const Json& j,
                        const std::filesystem::path& base_dir = {});
Json to_json(const GameSpec& game);

Json to_json(const CoverReport& report);
Json to_json(const ShatterCertificate& certificate);
ShatterCertificate certificate_from_json(const Json& j);

// The adversary's optimal covariate and response to every grid prediction,
// expanded over the whole game.
Json export_strategy(MinimaxSolver& solver);

Json to_json(const Covariate& x);
Covariate covariate_from_json(const Json& j);
Json to_json(const RoundRecord& record);
Json to_json(const AdmissibilityReport& report);

// One {"x", "y"} object per line.
std::vector<Observation> read_sequence(const std::filesystem::path& path);
void write_sequence(const std::filesystem::path& path,
                    std::span<const Observation> sequence);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace seqreg

#endif  // SEQREG_IO_HPP_
