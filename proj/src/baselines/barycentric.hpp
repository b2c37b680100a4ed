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

#include <array>
#include <vector>

#include "core/direction.hpp"

namespace hrtf {

struct BarycentricResult {
  std::vector<double> values;  // U x 2 x F
  // Targets outside the triangulated region, filled by clamping the best
  // triangle's weights to [0, 1] and renormalizing.
  int extrapolated_targets = 0;
  // True when the direction set could not be triangulated (M < 3 or all
  // points on one great circle) and distance_weighted was used instead.
  bool distance_weighted_fallback = false;
};

// Spherical-triangle interpolation. Triangulates the measured directions
// by the convex hull of their unit vectors, locates each target's
// containing triangle, and blends the vertex spectra with normalized
// barycentric weights (the solution of t = w1 v1 + w2 v2 + w3 v3 scaled
// to sum 1). Targets that coincide with a measured direction copy its
// row exactly.
BarycentricResult barycentric(const std::vector<Direction>& measured_dirs,
                              const std::vector<double>& measured,
                              int num_freqs,
                              const std::vector<Direction>& targets);

// Triangle weights for one target; exposed for tests. Returns the
// normalized weights and whether the target was inside.
struct TriangleWeights {
  std::array<double, 3> w;
  bool inside;
};
TriangleWeights spherical_triangle_weights(const std::array<std::array<double, 3>, 3>& verts,
                                           const std::array<double, 3>& target);

// Convex-hull triangulation of unit vectors; exposed for tests. Each
// face is a vertex index triple with outward orientation. Throws on
// degenerate input (fewer than 3 points or rank-deficient geometry).
std::vector<std::array<int, 3>> sphere_triangulation(
    const std::vector<Direction>& dirs);

}  // namespace hrtf
