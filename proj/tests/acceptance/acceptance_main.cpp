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

// Runs acceptance criteria 1-10 at full scale and prints one line per
// criterion. Informational lines are indented beneath their criterion.

#include <cstdio>
#include <string>

#include "seqreg/verification.hpp"

int main() {
  seqreg::SuiteOptions options;
  options.level = seqreg::VerifyLevel::kFull;
  const auto results = seqreg::run_suite(options);
  int failed = 0;
  for (const auto& r : results) {
    if (r.informational) {
      std::printf("      note %-4s %s: %s\n", r.id.c_str(), r.title.c_str(),
                  r.detail.c_str());
      continue;
    }
    if (!r.passed) ++failed;
    std::printf("%s criterion %-3s %s (margin %+.4e, %.2fs): %s\n",
                r.passed ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(),
                r.margin, r.seconds, r.detail.c_str());
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
