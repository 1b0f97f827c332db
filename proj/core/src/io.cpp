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

#include "seqreg/io.hpp"

#include <fstream>
#include <sstream>

#include "seqreg/errors.hpp"
#include "seqreg/numeric.hpp"

namespace seqreg {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? get_as<T>(j, key) : fallback;
}

Interval interval_from_json(const Json& j, const char* key) {
  const auto v = get_as<std::vector<double>>(j, key);
  if (v.size() != 2 || !(v[0] <= v[1])) {
    throw ConfigError(std::string("field \"") + key +
                      "\" must be [lo, hi] with lo <= hi");
  }
  return {v[0], v[1]};
}

Eigen::MatrixXd matrix_from_json(const Json& j, const char* key) {
  const auto rows = get_as<std::vector<std::vector<double>>>(j, key);
  if (rows.empty()) throw ConfigError(std::string("field \"") + key + "\" is empty");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ConfigError(std::string("field \"") + key + "\" is ragged");
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class Label>
LabeledTree<Label> tree_from_json(const Json& j) {
  auto levels = get_as<std::vector<std::vector<Label>>>(j, "levels");
  if (j.contains("depth") &&
      get_as<int>(j, "depth") != static_cast<int>(levels.size())) {
    throw ConfigError("tree: depth does not match the number of levels");
  }
  try {
    return LabeledTree<Label>(std::move(levels));
  } catch (const ShapeError& e) {
    throw ConfigError(e.what());
  }
}

template <class Label>
Json tree_to_json(const LabeledTree<Label>& tree) {
  return Json{{"depth", tree.depth()}, {"levels", tree.levels()}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

void strategy_node(MinimaxSolver& solver, std::vector<PlayedRound>& prefix,
                   Json& node) {
  const GameSpec& g = solver.game();
  if (static_cast<int>(prefix.size()) == g.horizon) return;
  const CovariateId x = g.covariates[solver.best_covariate_index(prefix)];
  node["x"] = x;
  node["value"] = solver.continuation(prefix);
  Json responses = Json::array();
  for (double p : g.prediction_grid) {
    const double y = g.outcome_grid[solver.best_outcome_index(prefix, x, p)];
    Json r{{"yhat", p}, {"y", y}};
    prefix.push_back({x, p, y});
    Json child = Json::object();
    strategy_node(solver, prefix, child);
    prefix.pop_back();
    if (!child.empty()) r["next"] = std::move(child);
    responses.push_back(std::move(r));
  }
  node["responses"] = std::move(responses);
}

}  // namespace

LossConfig loss_config_from_json(const Json& j) {
  LossConfig c;
  c.name = get_or<std::string>(j, "name", "square");
  c.B = get_or<double>(j, "B", 1.0);
  if (j.contains("q")) c.q = get_as<double>(j, "q");
  if (j.contains("K")) c.K = get_as<double>(j, "K");
  if (j.contains("r")) c.r = get_as<double>(j, "r");
  if (j.contains("prediction_range")) {
    c.prediction_range = interval_from_json(j, "prediction_range");
  }
  return c;
}

Json to_json(const LossConfig& c) {
  Json j{{"name", c.name}, {"B", c.B}};
  if (c.q) j["q"] = *c.q;
  if (c.K) j["K"] = *c.K;
  if (c.r) j["r"] = *c.r;
  if (c.prediction_range) {
    j["prediction_range"] = {c.prediction_range->lo, c.prediction_range->hi};
  }
  return j;
}

ComparatorFamily family_from_json(const Json& j,
                                  const std::filesystem::path& base_dir) {
  const auto kind = get_as<std::string>(j, "kind");
  if (kind == "finite_table") {
    std::optional<Interval> range;
    if (j.contains("output_range")) range = interval_from_json(j, "output_range");
    if (j.contains("csv")) {
      std::filesystem::path p = get_as<std::string>(j, "csv");
      if (p.is_relative()) p = base_dir / p;
      std::ifstream in(p);
      if (!in) throw IoError("cannot open family csv " + p.string());
      ComparatorFamily f = family_from_csv(in);
      if (!range) return f;
      return ComparatorFamily::finite_table(f.values(), f.covariate_ids(), range);
    }
    return ComparatorFamily::finite_table(
        matrix_from_json(j, "values"),
        get_or<std::vector<std::string>>(j, "covariate_ids", {}), range);
  }
  if (kind == "constants") {
    const auto levels = get_as<std::vector<double>>(j, "levels");
    return ComparatorFamily::constants(
        levels, get_or<std::size_t>(j, "num_covariates", 1));
  }
  if (kind == "linear") {
    return ComparatorFamily::linear(
        get_as<int>(j, "dimension"),
        get_or<double>(j, "weight_norm_bound", ComparatorFamily::kNoBound));
  }
  if (kind == "sparse_convex") {
    return ComparatorFamily::sparse_convex(
        matrix_from_json(j, "base"), get_as<int>(j, "sparsity"),
        get_or<std::vector<std::string>>(j, "covariate_ids", {}));
  }
  throw ConfigError("unknown family kind \"" + kind + "\"");
}

Json to_json(const ComparatorFamily& f) {
  switch (f.kind()) {
    case FamilyKind::kFiniteTable:
      return Json{{"kind", "finite_table"},
                  {"values", matrix_to_json(f.values())},
                  {"covariate_ids", f.covariate_ids()},
                  {"output_range", {f.output_range().lo, f.output_range().hi}}};
    case FamilyKind::kLinear: {
      Json j{{"kind", "linear"}, {"dimension", f.dimension()}};
      if (std::isfinite(f.weight_norm_bound())) {
        j["weight_norm_bound"] = f.weight_norm_bound();
      }
      return j;
    }
    case FamilyKind::kSparseConvex:
      return Json{{"kind", "sparse_convex"},
                  {"base", matrix_to_json(f.values())},
                  {"sparsity", f.sparsity()},
                  {"covariate_ids", f.covariate_ids()}};
  }
  throw ConfigError("unknown family kind");
}

ComparatorFamily family_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("family csv: missing header");
  std::vector<std::string> ids = split_csv(line);
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != ids.size()) {
      throw ConfigError("family csv line " + std::to_string(lineno) + ": " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(ids.size()));
    }
    std::vector<double> row;
    for (const std::string& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw ConfigError("family csv line " + std::to_string(lineno) +
                          ": not a number: \"" + c + "\"");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("family csv: no predictor rows");
  Eigen::MatrixXd m(rows.size(), ids.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < ids.size(); ++k) m(i, k) = rows[i][k];
  }
  return ComparatorFamily::finite_table(std::move(m), std::move(ids));
}

void write_family_csv(std::ostream& out, const ComparatorFamily& f) {
  if (!f.is_finite()) throw CapabilityError("family csv: finite tables only");
  const auto& ids = f.covariate_ids();
  for (std::size_t k = 0; k < f.num_covariates(); ++k) {
    out << (k ? "," : "") << (k < ids.size() ? ids[k] : std::to_string(k));
  }
  out << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = 0; k < f.num_covariates(); ++k) {
      out << (k ? "," : "") << Json(f.value(i, k)).dump();
    }
    out << '\n';
  }
}

RealTree real_tree_from_json(const Json& j) { return tree_from_json<double>(j); }
CovariateTree covariate_tree_from_json(const Json& j) {
  return tree_from_json<CovariateId>(j);
}
Json to_json(const RealTree& t) { return tree_to_json(t); }
Json to_json(const CovariateTree& t) { return tree_to_json(t); }

GameSpec game_from_json(const Json& j, const std::filesystem::path& base_dir) {
  GameSpec g;
  g.family = family_from_json(field(j, "family"), base_dir);
  g.model = LossModel::from_config(loss_config_from_json(field(j, "loss")));
  g.horizon = get_as<int>(j, "horizon");
  if (j.contains("covariates")) {
    g.covariates = get_as<std::vector<CovariateId>>(j, "covariates");
  } else {
    for (std::size_t x = 0; x < g.family.num_covariates(); ++x) {
      g.covariates.push_back(x);
    }
  }
  g.outcome_grid = get_as<std::vector<double>>(j, "outcome_grid");
  g.prediction_grid = get_as<std::vector<double>>(j, "prediction_grid");
  validate_game(g);
  return g;
}

Json to_json(const GameSpec& g) {
  return Json{{"family", to_json(g.family)},
              {"loss", to_json(g.model.config())},
              {"horizon", g.horizon},
              {"covariates", g.covariates},
              {"outcome_grid", g.outcome_grid},
              {"prediction_grid", g.prediction_grid}};
}

Json to_json(const CoverReport& r) {
  Json cover = Json::array();
  for (const RealTree& t : r.cover) cover.push_back(to_json(t));
  return Json{{"beta", r.beta},
              {"norm", r.norm == CoverNorm::kL2 ? "l2" : "linf"},
              {"size", r.size},
              {"cover", std::move(cover)},
              {"certificate", r.certificate},
              {"candidates", r.candidates}};
}

Json to_json(const ShatterCertificate& c) {
  return Json{{"depth", c.depth},
              {"covariate_tree", to_json(c.covariate_tree)},
              {"witness", to_json(c.witness)},
              {"selectors", c.selectors}};
}

ShatterCertificate certificate_from_json(const Json& j) {
  ShatterCertificate c;
  c.depth = get_as<int>(j, "depth");
  c.covariate_tree = covariate_tree_from_json(field(j, "covariate_tree"));
  c.witness = real_tree_from_json(field(j, "witness"));
  c.selectors = get_as<std::vector<std::size_t>>(j, "selectors");
  if (c.covariate_tree.depth() != c.depth || c.witness.depth() != c.depth) {
    throw ConfigError("certificate: tree depths disagree with \"depth\"");
  }
  return c;
}

Json export_strategy(MinimaxSolver& solver) {
  Json root{{"value", solver.value()},
            {"game", to_json(solver.game())},
            {"grid_tolerance", learner_grid_tolerance(solver.game())}};
  std::vector<PlayedRound> prefix;
  Json tree = Json::object();
  strategy_node(solver, prefix, tree);
  root["strategy"] = std::move(tree);
  return root;
}

Json to_json(const Covariate& x) {
  if (const auto* id = std::get_if<CovariateId>(&x)) return *id;
  const auto& v = std::get<Eigen::VectorXd>(x);
  return std::vector<double>(v.data(), v.data() + v.size());
}

Covariate covariate_from_json(const Json& j) {
  if (j.is_number_unsigned()) return j.get<CovariateId>();
  if (j.is_array()) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
        v.data(), static_cast<Eigen::Index>(v.size())));
  }
  throw ConfigError("covariate must be a nonnegative index or a number array");
}

Json to_json(const RoundRecord& r) {
  return Json{{"t", r.t},
              {"x", to_json(r.x)},
              {"yhat", r.yhat},
              {"y", r.y},
              {"loss", r.loss},
              {"cumulative_regret", r.cumulative_regret}};
}

Json to_json(const AdmissibilityReport& r) {
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
  };
  Json rounds = Json::array(), recipe = Json::array();
  for (double m : r.round_margins) rounds.push_back(finite_or_null(m));
  for (double m : r.recipe_margins) recipe.push_back(finite_or_null(m));
  return Json{{"round_margins", std::move(rounds)},
              {"recipe_margins", std::move(recipe)},
              {"initial_margin", finite_or_null(r.initial_margin)},
              {"empty_value", r.empty_value},
              {"prefixes_checked", r.prefixes_checked},
              {"admissible", r.admissible()}};
}

std::vector<Observation> read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sequence file " + path.string());
  std::vector<Observation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      out.push_back({covariate_from_json(field(j, "x")), get_as<double>(j, "y")});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return out;
}

void write_sequence(const std::filesystem::path& path,
                    std::span<const Observation> sequence) {
  std::string text;
  for (const Observation& o : sequence) {
    text += Json{{"x", to_json(o.x)}, {"y", o.y}}.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace seqreg
