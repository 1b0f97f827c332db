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

// seqreg command-line tool. Exit codes: 0 success, 1 a check failed,
// 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqreg/complexity.hpp"
#include "seqreg/errors.hpp"
#include "seqreg/forecasters.hpp"
#include "seqreg/harness.hpp"
#include "seqreg/io.hpp"
#include "seqreg/minimax.hpp"
#include "seqreg/rng.hpp"
#include "seqreg/verification.hpp"

namespace fs = std::filesystem;
using seqreg::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> formats;
};

Json load_config(const Common& c) {
  if (c.config.empty()) throw seqreg::ConfigError("--config is required");
  return seqreg::read_json_file(c.config);
}

fs::path config_dir(const Common& c) {
  return fs::path(c.config).parent_path();
}

void require_json_format(const Common& c) {
  for (const auto& f : c.formats) {
    if (f != "json") {
      throw seqreg::ConfigError("format \"" + f + "\" is not available here");
    }
  }
}

// Prints the document, and writes it to <out>/<name>.json when --out is set.
void emit(const Common& c, const std::string& name, const Json& doc) {
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    seqreg::write_text_file(fs::path(c.out) / (name + ".json"), text);
  }
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw seqreg::ConfigError(std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw seqreg::ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

seqreg::LossModel loss_of(const Json& j) {
  return seqreg::LossModel::from_config(
      seqreg::loss_config_from_json(j.value("loss", Json::object())));
}

seqreg::CoverNorm norm_of(const Json& j) {
  const std::string n = j.value("norm", std::string("linf"));
  if (n == "l2") return seqreg::CoverNorm::kL2;
  if (n == "linf") return seqreg::CoverNorm::kLinf;
  throw seqreg::ConfigError("norm must be \"l2\" or \"linf\"");
}

seqreg::ScalarFn offset_of(const Json& j, const seqreg::LossModel& model) {
  const std::string kind = j.value("offset", std::string("delta_lower"));
  if (kind == "zero") return [](double) { return 0.0; };
  if (kind == "square") return [](double x) { return x * x; };
  if (kind == "delta_lower") {
    return [model](double x) { return seqreg::delta_lower(model, x); };
  }
  if (kind == "delta_upper") {
    return [model](double x) { return seqreg::delta_upper(model, x); };
  }
  throw seqreg::ConfigError("unknown offset \"" + kind + "\"");
}

// ---------------------------------------------------------------------------

int cmd_run(const Common& c) {
  seqreg::ExperimentConfig cfg =
      seqreg::experiment_config_from_json(load_config(c), config_dir(c));
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output.directory = c.out;
  if (!c.formats.empty()) {
    cfg.output.formats = c.formats;
    cfg.output.formats.push_back("json");  // the summary is always written
  }
  const seqreg::ExperimentResult r = seqreg::run_experiment(cfg);
  std::cout << r.summary.dump(2) << "\n";
  return r.bound_satisfied ? kExitOk : kExitCheckFailed;
}

int cmd_admissibility(const Common& c) {
  require_json_format(c);
  const Json j = load_config(c);
  const seqreg::ComparatorFamily family =
      seqreg::family_from_json(field<Json>(j, "family"), config_dir(c));
  const seqreg::LossModel model = loss_of(j);
  const int n = field<int>(j, "horizon");
  const Json rj = j.value("relaxation", Json::object());
  const std::string kind = rj.value("kind", std::string("experts"));

  seqreg::RelaxationOracle rel;
  if (kind == "experts") {
    rel = seqreg::experts_oracle(family, model.B(), n, rj.value("temperature", 0.0));
  } else if (kind == "vaw") {
    rel = seqreg::vaw_oracle(family.dimension(), rj.value("lambda", 1.0),
                             model.B(), n);
  } else if (kind == "conditional") {
    std::vector<seqreg::CovariateId> xs;
    for (std::size_t x = 0; x < family.num_covariates(); ++x) xs.push_back(x);
    rel = seqreg::conditional_rademacher_oracle(
        family, model, xs, rj.value("mu_grid", std::vector<double>{0.0}), n);
  } else if (kind == "zero") {
    rel = seqreg::zero_oracle(n);
  } else {
    throw seqreg::ConfigError("unknown relaxation \"" + kind + "\"");
  }

  seqreg::AdmissibilityGrids grids;
  for (const Json& x : field<Json>(j, "covariates")) {
    grids.covariates.push_back(seqreg::covariate_from_json(x));
  }
  grids.outcome_grid = field<std::vector<double>>(j, "outcome_grid");
  grids.B = model.B();
  grids.mixing_points = j.value("mixing_points", 101);
  const Json pj = j.value("predictions", Json::object());
  if (pj.contains("grid")) {
    grids.predictions = field<std::vector<double>>(pj, "grid");
  } else {
    const auto iv = pj.value("interval", std::vector<double>{-model.B(), model.B()});
    if (iv.size() != 2) throw seqreg::ConfigError("interval needs two numbers");
    grids.predictions = seqreg::Interval{iv[0], iv[1]};
  }

  // Full enumeration unless a sample size is given.
  std::vector<seqreg::History> histories;
  const Json hj = j.value("histories", Json::object());
  if (hj.contains("random")) {
    seqreg::PortableRng rng(c.seed.value_or(j.value("seed", std::uint64_t{0})));
    const int count = field<int>(hj, "random");
    for (int h = 0; h < count; ++h) {
      seqreg::History hist;
      for (int t = 0; t < n; ++t) {
        hist.push_back({grids.covariates[rng.below(grids.covariates.size())],
                        grids.outcome_grid[rng.below(grids.outcome_grid.size())]});
      }
      histories.push_back(std::move(hist));
    }
  } else {
    histories = seqreg::enumerate_histories(grids.covariates, grids.outcome_grid, n);
  }
  const auto report = seqreg::check_admissibility(rel, model, grids, histories);
  const double tol = j.value("tolerance", 1e-8);
  Json doc = seqreg::to_json(report);
  doc["relaxation"] = rel.name;
  doc["histories"] = histories.size();
  doc["admissible"] = report.admissible(tol);
  emit(c, "admissibility", doc);
  return report.admissible(tol) ? kExitOk : kExitCheckFailed;
}

int cmd_complexity(const std::string& sub, const Common& c, int khinchine_k) {
  require_json_format(c);
  if (sub == "khinchine") {
    const seqreg::KhinchineResult r = seqreg::khinchine_check(khinchine_k);
    emit(c, "khinchine", Json{{"k", khinchine_k},
                              {"mean_abs_sum", r.mean_abs_sum},
                              {"lower_bound", std::sqrt(0.5 * khinchine_k)},
                              {"holds", r.holds}});
    return r.holds ? kExitOk : kExitCheckFailed;
  }
  const Json j = load_config(c);
  if (sub == "rates") {
    const double p = field<double>(j, "p"), r = j.value("r", 2.0);
    const double K = j.value("K", 1.0);
    const int n = field<int>(j, "n");
    Json doc{{"p", p}, {"r", r}, {"K", K}, {"n", n},
             {"upper", seqreg::rate_upper(p, r, j.value("G", 1.0), K, n)},
             {"lower", seqreg::rate_lower(p, r, j.value("R", 1.0), K, n)},
             {"upper_exponent", seqreg::rate_upper_exponent(p, r, K)},
             {"lower_exponent", seqreg::rate_lower_exponent(p, r, K)},
             {"upper_log_power", seqreg::rate_upper_log_power(p, K)}};
    if (j.contains("sparse")) {
      const Json& s = j.at("sparse");
      doc["sparse_cover_bound"] = seqreg::sparse_cover_bound(
          field<int>(s, "M"), field<int>(s, "s"), field<double>(s, "beta"));
    }
    emit(c, "rates", doc);
    return kExitOk;
  }

  const seqreg::ComparatorFamily family =
      seqreg::family_from_json(field<Json>(j, "family"), config_dir(c));
  if (sub == "fat") {
    std::vector<seqreg::CovariateId> xs;
    if (j.contains("covariates")) {
      xs = field<std::vector<seqreg::CovariateId>>(j, "covariates");
    } else {
      for (std::size_t x = 0; x < family.num_covariates(); ++x) xs.push_back(x);
    }
    const auto r = seqreg::fat_shattering(family, xs, field<double>(j, "beta"),
                                          j.value("max_depth", 4));
    Json doc{{"dimension", r.dimension}};
    if (r.certificate) doc["certificate"] = seqreg::to_json(*r.certificate);
    emit(c, "fat", doc);
    return kExitOk;
  }

  const seqreg::CovariateTree x =
      seqreg::covariate_tree_from_json(field<Json>(j, "tree"));
  if (sub == "rademacher") {
    emit(c, "rademacher", Json{{"value", seqreg::seq_rademacher(family, x)}});
    return kExitOk;
  }
  if (sub == "offset") {
    const seqreg::LossModel model = loss_of(j);
    const seqreg::RealTree mu =
        j.contains("mu") ? seqreg::real_tree_from_json(j.at("mu"))
                         : seqreg::RealTree::constant(x.depth(), 0.0);
    const double C = j.value("C", model.grad_bound());
    emit(c, "offset",
         Json{{"value", seqreg::offset_rademacher(family, x, mu, C,
                                                  offset_of(j, model))},
              {"C", C}});
    return kExitOk;
  }
  if (sub == "cover") {
    const auto r = seqreg::seq_cover_number(family, x, field<double>(j, "beta"),
                                            norm_of(j));
    Json doc = seqreg::to_json(r);
    doc["verified"] = seqreg::verify_cover(family, x, r);
    emit(c, "cover", doc);
    return doc["verified"].get<bool>() ? kExitOk : kExitCheckFailed;
  }
  if (sub == "dudley") {
    const auto profile = seqreg::cover_entropy(family, x, norm_of(j));
    const auto m = profile.dudley_minimum(x.depth(), j.value("gamma", 2.0));
    emit(c, "dudley", Json{{"scales", profile.scales()},
                           {"log_sizes", profile.log_sizes()},
                           {"bound", m.value},
                           {"rho", m.argmin},
                           {"rademacher", seqreg::seq_rademacher(family, x)}});
    return kExitOk;
  }
  throw seqreg::ConfigError("unknown complexity sub-verb \"" + sub + "\"");
}

int cmd_minimax(const Common& c, bool strategy) {
  require_json_format(c);
  const seqreg::GameSpec game =
      seqreg::game_from_json(load_config(c), config_dir(c));
  seqreg::MinimaxSolver solver(game);
  Json doc{{"value", solver.value()},
           {"horizon", game.horizon},
           {"learner_grid_tolerance", seqreg::learner_grid_tolerance(game)},
           {"states", solver.memo_size()}};
  if (strategy) doc["strategy"] = seqreg::export_strategy(solver);
  emit(c, "minimax", doc);
  return kExitOk;
}

int cmd_verify(const Common& c, const std::string& level, bool inject,
               const std::vector<std::string>& only) {
  seqreg::SuiteOptions options;
  if (level == "fast") {
    options.level = seqreg::VerifyLevel::kFast;
  } else if (level == "full") {
    options.level = seqreg::VerifyLevel::kFull;
  } else {
    throw seqreg::ConfigError("level must be fast or full");
  }
  options.inject_broken_relaxation = inject;
  options.only = only;
  const auto results = seqreg::run_suite(options);
  std::cout << seqreg::format_results(results);
  const bool ok = seqreg::all_passed(results);
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    Json doc = Json::array();
    std::string csv = "id,title,status,margin,seconds\n";
    for (const auto& r : results) {
      const std::string status =
          r.informational ? "info" : (r.passed ? "pass" : "fail");
      doc.push_back(Json{{"id", r.id}, {"title", r.title}, {"status", status},
                         {"margin", r.margin}, {"detail", r.detail},
                         {"seconds", r.seconds}});
      csv += r.id + ",\"" + r.title + "\"," + status + "," +
             std::to_string(r.margin) + "," + std::to_string(r.seconds) + "\n";
    }
    const auto formats = c.formats.empty() ? std::vector<std::string>{"json"}
                                           : c.formats;
    for (const auto& f : formats) {
      if (f == "json") {
        seqreg::write_text_file(fs::path(c.out) / "verify.json", doc.dump(2) + "\n");
      } else if (f == "csv") {
        seqreg::write_text_file(fs::path(c.out) / "verify.csv", csv);
      } else {
        throw seqreg::ConfigError("format \"" + f + "\" is not available here");
      }
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online regression forecasters and sequential complexity tools"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&common](CLI::App* cmd) {
    cmd->add_option("--config", common.config, "JSON configuration file");
    cmd->add_option("--seed", common.seed, "Override the configured seed");
    cmd->add_option("--out", common.out, "Output directory");
    cmd->add_option("--format", common.formats, "json, csv or svg (repeatable)")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
  };

  CLI::App* run = app.add_subcommand("run", "Play an experiment and write its logs");
  add_common(run);
  CLI::App* adm = app.add_subcommand("admissibility", "Check a relaxation on sampled histories");
  add_common(adm);

  CLI::App* cx = app.add_subcommand("complexity", "Complexity computations");
  cx->require_subcommand(1);
  int khinchine_k = 8;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const char* name : {"rademacher", "offset", "cover", "fat", "dudley", "rates", "khinchine"}) {
    CLI::App* s = cx->add_subcommand(name);
    add_common(s);
    subs.emplace_back(name, s);
  }
  subs.back().second->add_option("-k", khinchine_k, "Number of signs")
      ->check(CLI::Range(1, 30));

  CLI::App* mm = app.add_subcommand("minimax", "Exact minimax value of a finite game");
  add_common(mm);
  bool strategy = false;
  mm->add_flag("--strategy", strategy, "Include the adversary's strategy tree");

  CLI::App* ver = app.add_subcommand("verify", "Run the acceptance suite");
  add_common(ver);
  std::string level = "fast";
  bool inject = false;
  std::vector<std::string> only;
  ver->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  ver->add_flag("--inject-broken", inject, "Add a deliberately broken relaxation");
  ver->add_option("--only", only, "Criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(common);
    if (*adm) return cmd_admissibility(common);
    if (*mm) return cmd_minimax(common, strategy);
    if (*ver) return cmd_verify(common, level, inject, only);
    for (const auto& [name, s] : subs) {
      if (*s) return cmd_complexity(name, common, khinchine_k);
    }
  } catch (const seqreg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const seqreg::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const seqreg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
