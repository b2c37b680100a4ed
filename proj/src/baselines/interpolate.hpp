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

#include <functional>
#include <vector>

#include "core/direction.hpp"

namespace hrtf {

// Spatial weighting kernel for distance-weighted interpolation.
using SpatialKernel =
    std::function<double(const Direction& target, const Direction& measured)>;

// Default kernel 1/(gcd + eps)^2 with eps = 1e-6 rad; the epsilon bounds
// the singularity when a target coincides with a measurement.
SpatialKernel inverse_square_kernel(double eps_rad = 1e-6);

// Copies each target's great-circle-nearest measured spectrum; ties go to
// the lowest measured index. measured is M x 2 x F, result U x 2 x F.
std::vector<double> nearest_neighbor(const std::vector<Direction>& measured_dirs,
                                     const std::vector<double>& measured,
                                     int num_freqs,
                                     const std::vector<Direction>& targets);

// Kernel-weighted mean of the measured spectra, normalized by the weight
// sum. Throws if every weight for some target is zero.
std::vector<double> distance_weighted(const std::vector<Direction>& measured_dirs,
                                      const std::vector<double>& measured,
                                      int num_freqs,
                                      const std::vector<Direction>& targets,
                                      const SpatialKernel& kernel = inverse_square_kernel());

}  // namespace hrtf
