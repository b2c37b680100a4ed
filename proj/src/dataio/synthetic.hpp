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

#ifndef HRTFKIT_DATAIO_SYNTHETIC_HPP_
#define HRTFKIT_DATAIO_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "core/hrtf_set.hpp"

namespace hrtf {

// Recipe for a deterministic synthetic dataset. The same spec always
// produces byte-identical sets.
struct SyntheticSpec {
  uint64_t seed = 0;
  uint32_t n_subjects = 1;
  uint32_t num_directions = 64;  // covering spiral over the sphere
  uint32_t num_freqs = 32;
  int sh_order = 3;     // spatial smoothness of the random field
  int notch_count = 2;  // elevation-shifting spectral notches per ear
};

// Generates n_subjects HRTF sets on a shared spiral direction covering.
// Per subject and ear, logmag(d, f) is a random spherical-harmonic field
// of order sh_order (coefficients decaying as 1/(1+n^2)) scaled by a
// smooth frequency envelope, minus notch_count Gaussian-shaped notches
// whose center bin shifts linearly with elevation. The right ear is the
// left-ear construction evaluated at the azimuth-mirrored direction plus
// a small independent perturbation field. Values are clamped to
// [-60, +20] dB.
std::vector<HrtfSet> generate_synthetic(const SyntheticSpec& spec);

}  // namespace hrtf

#endif  // HRTFKIT_DATAIO_SYNTHETIC_HPP_
