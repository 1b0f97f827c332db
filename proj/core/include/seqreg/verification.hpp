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

#ifndef SEQREG_VERIFICATION_HPP_
#define SEQREG_VERIFICATION_HPP_

#include <span>
#include <string>
#include <vector>

namespace seqreg {

enum class VerifyLevel { kFast, kFull };

// One line of the acceptance table. Informational lines never fail the
// suite; they carry diagnostics next to the criterion they explain.
struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  bool informational = false;
  double margin = 0.0;  // worst slack; negative means violated
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  VerifyLevel level = VerifyLevel::kFull;
  // Adds a relaxation that is known to violate the initial condition to the
  // admissibility criterion.
  bool inject_broken_relaxation = false;
  std::vector<std::string> only;  // criterion ids to run; empty runs all
};

std::vector<CheckResult> verify_experts_regret(VerifyLevel level);
std::vector<CheckResult> verify_vaw_regret(VerifyLevel level);
std::vector<CheckResult> verify_admissibility(VerifyLevel level,
                                              bool inject_broken);
std::vector<CheckResult> verify_finite_class_bound(VerifyLevel level);
std::vector<CheckResult> verify_minimax_sandwich(VerifyLevel level);
std::vector<CheckResult> verify_value_monotonicity(VerifyLevel level);
std::vector<CheckResult> verify_combinatorics(VerifyLevel level);
std::vector<CheckResult> verify_khinchine(VerifyLevel level);
std::vector<CheckResult> verify_rates(VerifyLevel level);
std::vector<CheckResult> verify_offset_collapse(VerifyLevel level);

std::vector<CheckResult> run_suite(const SuiteOptions& options);

// True when every non-informational line passed.
bool all_passed(std::span<const CheckResult> results);

// Fixed-width table, one line per result.
std::string format_results(std::span<const CheckResult> results);

}  // namespace seqreg

#endif  // SEQREG_VERIFICATION_HPP_
