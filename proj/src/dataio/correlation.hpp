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

#ifndef HRTFKIT_DATAIO_CORRELATION_HPP_
#define HRTFKIT_DATAIO_CORRELATION_HPP_

#include <string>
#include <vector>

#include "core/hrtf_set.hpp"

namespace hrtf {

// Frequency-frequency Pearson correlation of log-magnitudes. The sample
// population is every (subject, direction, ear) triple across all sets,
// which must share one frequency grid. The result is F x F row-major,
// symmetric, with unit diagonal and entries in [-1, 1]. A bin whose
// samples are constant makes the correlation undefined and raises an
// error naming the bin.
std::vector<double> frequency_correlation(const std::vector<HrtfSet>& sets);

// CSV rendering: a header row of bin frequencies in Hz, then F rows of F
// correlation values, 9 significant digits.
std::string correlation_csv(const std::vector<double>& matrix,
                            const FrequencyGrid& grid);

}  // namespace hrtf

#endif  // HRTFKIT_DATAIO_CORRELATION_HPP_
