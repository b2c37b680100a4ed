// Copyright 2026 The hrtfkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

#include "core/direction.hpp"

namespace hrtf {

// Deterministic splitmix64 generator. std::mt19937_64 would be fine, but
// the std distributions are implementation-defined, and synthetic data and
// model initialization must be byte-identical across toolchains. Gaussian
// draws use an explicit Box-Muller transform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1], safe as a log argument.
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = next_double_open();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * kPi * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return n ? next_u64() % n : 0; }

  // Derive an independent stream; used to give substructures (subjects,
  // ears, layers) their own generators in a reproducible way.
  Rng fork(uint64_t stream) {
    uint64_t mixed = state_ ^ (0x632be59bd9b4e019ULL * (stream + 1));
    Rng child(mixed);
    child.next_u64();
    return child;
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hrtf
