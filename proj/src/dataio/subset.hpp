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

#ifndef HRTFKIT_DATAIO_SUBSET_HPP_
#define HRTFKIT_DATAIO_SUBSET_HPP_

#include <vector>

#include "core/direction.hpp"
#include "core/hrtf_set.hpp"

namespace hrtf {

// Wraps an explicit measured-index list. Validation (range, duplicates,
// 1 <= M < D) happens in the SparseConfig constructor.
SparseConfig subset_explicit(std::vector<int> measured, int num_directions);

// Greedy farthest-point sampling, always starting at index 0: each step
// adds the direction maximizing the minimum great-circle distance to the
// already selected set, lowest index on ties.
SparseConfig subset_farthest_point(const std::vector<Direction>& directions,
                                   int num_measured);

}  // namespace hrtf

#endif  // HRTFKIT_DATAIO_SUBSET_HPP_
