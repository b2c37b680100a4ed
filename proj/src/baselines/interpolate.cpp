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

#include "baselines/interpolate.hpp"

#include "core/error.hpp"

namespace hrtf {

SpatialKernel inverse_square_kernel(double eps_rad) {
  return [eps_rad](const Direction& target, const Direction& measured) {
    const double d = great_circle_distance(target, measured) + eps_rad;
    return 1.0 / (d * d);
  };
}

std::vector<double> nearest_neighbor(const std::vector<Direction>& measured_dirs,
                                     const std::vector<double>& measured,
                                     int num_freqs,
                                     const std::vector<Direction>& targets) {
  if (measured_dirs.empty()) throw_invalid("nearest_neighbor: no measurements");
  const size_t row = 2 * static_cast<size_t>(num_freqs);
  if (measured.size() != measured_dirs.size() * row) {
    throw_invalid("nearest_neighbor: measured size does not match M*2*F");
  }
  std::vector<double> out(targets.size() * row);
  for (size_t t = 0; t < targets.size(); ++t) {
    size_t best = 0;
    double best_dist = great_circle_distance(targets[t], measured_dirs[0]);
    for (size_t m = 1; m < measured_dirs.size(); ++m) {
      const double dist = great_circle_distance(targets[t], measured_dirs[m]);
      if (dist < best_dist) {
        best_dist = dist;
        best = m;
      }
    }
    const double* src = measured.data() + best * row;
    std::copy(src, src + row, out.begin() + static_cast<std::ptrdiff_t>(t * row));
  }
  return out;
}

std::vector<double> distance_weighted(const std::vector<Direction>& measured_dirs,
                                      const std::vector<double>& measured,
                                      int num_freqs,
                                      const std::vector<Direction>& targets,
                                      const SpatialKernel& kernel) {
  if (measured_dirs.empty()) throw_invalid("distance_weighted: no measurements");
  const size_t row = 2 * static_cast<size_t>(num_freqs);
  if (measured.size() != measured_dirs.size() * row) {
    throw_invalid("distance_weighted: measured size does not match M*2*F");
  }
  std::vector<double> out(targets.size() * row, 0.0);
  std::vector<double> w(measured_dirs.size());
  for (size_t t = 0; t < targets.size(); ++t) {
    double wsum = 0.0;
    for (size_t m = 0; m < measured_dirs.size(); ++m) {
      w[m] = kernel(targets[t], measured_dirs[m]);
      if (w[m] < 0.0) throw_invalid("distance_weighted: negative kernel weight");
      wsum += w[m];
    }
    if (!(wsum > 0.0)) {
      throw Error(ErrorCode::kNumeric,
                  "distance_weighted: all weights zero for target " +
                      std::to_string(t));
    }
    double* dst = out.data() + t * row;
    for (size_t m = 0; m < measured_dirs.size(); ++m) {
      const double wm = w[m] / wsum;
      if (wm == 0.0) continue;
      const double* src = measured.data() + m * row;
      for (size_t k = 0; k < row; ++k) dst[k] += wm * src[k];
    }
  }
  return out;
}

}  // namespace hrtf
