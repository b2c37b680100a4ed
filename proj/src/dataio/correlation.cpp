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

#include "dataio/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace hrtf {

std::vector<double> frequency_correlation(const std::vector<HrtfSet>& sets) {
  if (sets.empty()) throw_invalid("frequency_correlation: no sets");
  const FrequencyGrid& grid = sets.front().freq_grid();
  size_t num_samples = 0;
  for (const HrtfSet& set : sets) {
    if (!(set.freq_grid() == grid)) {
      throw_invalid("frequency_correlation: sets use different frequency grids");
    }
    num_samples += static_cast<size_t>(set.num_directions()) * kNumEars;
  }
  if (num_samples < 2) {
    throw_invalid("frequency_correlation: need at least 2 (subject, direction, ear) samples");
  }
  const int num_freqs = grid.size();

  // Two passes: per-bin means, then centered cross products.
  std::vector<double> mean(static_cast<size_t>(num_freqs), 0.0);
  for (const HrtfSet& set : sets) {
    const std::vector<float>& data = set.logmag_db();
    const size_t rows = static_cast<size_t>(set.num_directions()) * kNumEars;
    for (size_t r = 0; r < rows; ++r) {
      for (int f = 0; f < num_freqs; ++f) {
        mean[static_cast<size_t>(f)] += data[r * static_cast<size_t>(num_freqs) + static_cast<size_t>(f)];
      }
    }
  }
  for (double& m : mean) m /= static_cast<double>(num_samples);

  std::vector<double> cov(static_cast<size_t>(num_freqs) * static_cast<size_t>(num_freqs), 0.0);
  std::vector<double> centered(static_cast<size_t>(num_freqs));
  for (const HrtfSet& set : sets) {
    const std::vector<float>& data = set.logmag_db();
    const size_t rows = static_cast<size_t>(set.num_directions()) * kNumEars;
    for (size_t r = 0; r < rows; ++r) {
      for (int f = 0; f < num_freqs; ++f) {
        centered[static_cast<size_t>(f)] =
            data[r * static_cast<size_t>(num_freqs) + static_cast<size_t>(f)] -
            mean[static_cast<size_t>(f)];
      }
      for (int i = 0; i < num_freqs; ++i) {
        const double ci = centered[static_cast<size_t>(i)];
        double* row = cov.data() + static_cast<size_t>(i) * static_cast<size_t>(num_freqs);
        for (int j = i; j < num_freqs; ++j) {
          row[j] += ci * centered[static_cast<size_t>(j)];
        }
      }
    }
  }

  // A bin counts as constant when its spread is at rounding scale.
  std::vector<double> stddev(static_cast<size_t>(num_freqs));
  for (int f = 0; f < num_freqs; ++f) {
    const double ssd = cov[static_cast<size_t>(f) * static_cast<size_t>(num_freqs) + static_cast<size_t>(f)];
    const double tol = 1e-12 * (1.0 + std::abs(mean[static_cast<size_t>(f)]));
    if (ssd <= static_cast<double>(num_samples) * tol * tol) {
      throw_numeric("frequency_correlation: zero variance at bin " + std::to_string(f) +
                    " (" + std::to_string(grid[f]) + " Hz), correlation undefined");
    }
    stddev[static_cast<size_t>(f)] = std::sqrt(ssd);
  }

  std::vector<double> corr(cov.size());
  for (int i = 0; i < num_freqs; ++i) {
    corr[static_cast<size_t>(i) * static_cast<size_t>(num_freqs) + static_cast<size_t>(i)] = 1.0;
    for (int j = i + 1; j < num_freqs; ++j) {
      const double v = std::clamp(
          cov[static_cast<size_t>(i) * static_cast<size_t>(num_freqs) + static_cast<size_t>(j)] /
              (stddev[static_cast<size_t>(i)] * stddev[static_cast<size_t>(j)]),
          -1.0, 1.0);
      corr[static_cast<size_t>(i) * static_cast<size_t>(num_freqs) + static_cast<size_t>(j)] = v;
      corr[static_cast<size_t>(j) * static_cast<size_t>(num_freqs) + static_cast<size_t>(i)] = v;
    }
  }
  return corr;
}

std::string correlation_csv(const std::vector<double>& matrix,
                            const FrequencyGrid& grid) {
  const size_t num_freqs = static_cast<size_t>(grid.size());
  if (matrix.size() != num_freqs * num_freqs) {
    throw_invalid("correlation_csv: matrix is not F x F");
  }
  char buf[40];
  std::string out;
  for (size_t f = 0; f < num_freqs; ++f) {
    std::snprintf(buf, sizeof(buf), "%.9g", grid[static_cast<int>(f)]);
    if (f) out += ',';
    out += buf;
  }
  out += '\n';
  for (size_t i = 0; i < num_freqs; ++i) {
    for (size_t j = 0; j < num_freqs; ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", matrix[i * num_freqs + j]);
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace hrtf
