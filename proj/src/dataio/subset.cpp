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

#include "dataio/subset.hpp"

#include <limits>

#include "core/error.hpp"

namespace hrtf {

SparseConfig subset_explicit(std::vector<int> measured, int num_directions) {
  return SparseConfig(std::move(measured), num_directions);
}

SparseConfig subset_farthest_point(const std::vector<Direction>& directions,
                                   int num_measured) {
  const int num_dirs = static_cast<int>(directions.size());
  if (num_measured < 1 || num_measured >= num_dirs) {
    throw_invalid("subset_farthest_point: need 1 <= M < D");
  }

  std::vector<int> selected = {0};
  // min_dist[d] = distance from d to the closest selected direction.
  std::vector<double> min_dist(static_cast<size_t>(num_dirs));
  for (int d = 0; d < num_dirs; ++d) {
    min_dist[static_cast<size_t>(d)] =
        great_circle_distance(directions[static_cast<size_t>(d)], directions[0]);
  }
  while (static_cast<int>(selected.size()) < num_measured) {
    int best = -1;
    double best_dist = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < num_dirs; ++d) {
      if (min_dist[static_cast<size_t>(d)] > best_dist) {
        best_dist = min_dist[static_cast<size_t>(d)];
        best = d;
      }
    }
    selected.push_back(best);
    for (int d = 0; d < num_dirs; ++d) {
      const double dist = great_circle_distance(directions[static_cast<size_t>(d)],
                                                directions[static_cast<size_t>(best)]);
      if (dist < min_dist[static_cast<size_t>(d)]) min_dist[static_cast<size_t>(d)] = dist;
    }
  }
  return SparseConfig(std::move(selected), num_dirs);
}

}  // namespace hrtf
