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

#ifndef SEQREG_RNG_HPP_
#define SEQREG_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace seqreg {

// Seeded generator whose output is identical on every platform: the engine
// is std::mt19937_64 (fully specified by the standard) and the real-valued
// transforms are written out here instead of using std distributions, whose
// algorithms are implementation-defined.
class PortableRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1} by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  int sign() { return (engine_() >> 63) ? 1 : -1; }

  // Standard normal by Box-Muller; the second variate is discarded so the
  // stream position depends only on the number of calls.
  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seqreg

#endif  // SEQREG_RNG_HPP_
