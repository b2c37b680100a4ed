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

#include "core/hrtf_set.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace hrtf {

FrequencyGrid::FrequencyGrid(std::vector<double> frequencies_hz)
    : frequencies_hz_(std::move(frequencies_hz)) {
  if (frequencies_hz_.empty()) {
    throw_invalid("FrequencyGrid: empty frequency list");
  }
  double prev = 0.0;
  for (double f : frequencies_hz_) {
    if (!std::isfinite(f) || f <= prev) {
      throw_invalid("FrequencyGrid: frequencies must be strictly increasing "
                    "and positive");
    }
    prev = f;
  }
}

FrequencyGrid FrequencyGrid::from_fft_bins(double sample_rate_hz, int fft_size,
                                           int first_bin, int count) {
  if (sample_rate_hz <= 0 || fft_size <= 0 || first_bin < 1 || count < 1) {
    throw_invalid("FrequencyGrid::from_fft_bins: bad parameters");
  }
  const double spacing = sample_rate_hz / fft_size;
  std::vector<double> f(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) f[static_cast<size_t>(i)] = spacing * (first_bin + i);
  return FrequencyGrid(std::move(f));
}

double log_magnitude(double h_linear) {
  if (!(h_linear > 0.0) || !std::isfinite(h_linear)) {
    throw Error(ErrorCode::kNumeric,
                "log_magnitude: magnitude must be positive and finite");
  }
  return 20.0 * std::log10(h_linear);
}

HrtfSet::HrtfSet(std::string subject_id, std::vector<Direction> directions,
                 FrequencyGrid freq_grid, double sample_rate_hz,
                 std::vector<float> logmag_db)
    : subject_id_(std::move(subject_id)),
      directions_(std::move(directions)),
      freq_grid_(std::move(freq_grid)),
      sample_rate_hz_(sample_rate_hz),
      logmag_db_(std::move(logmag_db)) {
  if (directions_.empty()) throw_invalid("HrtfSet: no directions");
  const size_t expected = directions_.size() * kNumEars *
                          static_cast<size_t>(freq_grid_.size());
  if (logmag_db_.size() != expected) {
    throw_invalid("HrtfSet: payload size " + std::to_string(logmag_db_.size()) +
                  " does not match D*2*F = " + std::to_string(expected));
  }
  for (float v : logmag_db_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNumeric, "HrtfSet: non-finite log-magnitude");
    }
  }
  // Duplicate directions would make interpolation weights ill-defined.
  for (size_t i = 0; i < directions_.size(); ++i) {
    for (size_t j = i + 1; j < directions_.size(); ++j) {
      if (great_circle_distance(directions_[i], directions_[j]) <= 1e-9) {
        throw_invalid("HrtfSet: duplicate directions at indices " +
                      std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

SparseConfig::SparseConfig(std::vector<int> measured, int num_directions)
    : measured_(std::move(measured)), num_directions_(num_directions) {
  if (num_directions_ < 2) {
    throw_invalid("SparseConfig: need at least 2 directions");
  }
  if (measured_.empty()) {
    throw_invalid("SparseConfig: measured index set is empty");
  }
  std::sort(measured_.begin(), measured_.end());
  for (size_t i = 0; i < measured_.size(); ++i) {
    if (measured_[i] < 0 || measured_[i] >= num_directions_) {
      throw_invalid("SparseConfig: index " + std::to_string(measured_[i]) +
                    " out of range [0, " + std::to_string(num_directions_) + ")");
    }
    if (i > 0 && measured_[i] == measured_[i - 1]) {
      throw_invalid("SparseConfig: duplicate index " +
                    std::to_string(measured_[i]));
    }
  }
  if (static_cast<int>(measured_.size()) >= num_directions_) {
    throw_invalid("SparseConfig: M must be < D");
  }
  unmeasured_.reserve(static_cast<size_t>(num_directions_) - measured_.size());
  size_t k = 0;
  for (int d = 0; d < num_directions_; ++d) {
    if (k < measured_.size() && measured_[k] == d) {
      ++k;
    } else {
      unmeasured_.push_back(d);
    }
  }
}

SplitSet split_set(const HrtfSet& set, const SparseConfig& cfg) {
  if (cfg.num_directions() != set.num_directions()) {
    throw_invalid("split_set: SparseConfig is for " +
                  std::to_string(cfg.num_directions()) + " directions, set has " +
                  std::to_string(set.num_directions()));
  }
  SplitSet out;
  out.measured = gather_rows(set.logmag_db(), set.num_freqs(), cfg.measured());
  out.unmeasured = gather_rows(set.logmag_db(), set.num_freqs(), cfg.unmeasured());
  return out;
}

}  // namespace hrtf
