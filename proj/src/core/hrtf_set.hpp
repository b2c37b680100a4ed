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

#include <cstdint>
#include <string>
#include <vector>

#include "core/direction.hpp"

namespace hrtf {

// Ear axis indexing used everywhere in the toolkit.
inline constexpr int kEarLeft = 0;
inline constexpr int kEarRight = 1;
inline constexpr int kNumEars = 2;

// Retained frequency bins, strictly increasing and positive.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> frequencies_hz);

  // Uniform grid of `count` bins spaced sample_rate/fft_size apart,
  // starting at bin `first_bin` (1-based FFT bin index).
  static FrequencyGrid from_fft_bins(double sample_rate_hz, int fft_size,
                                     int first_bin, int count);

  int size() const { return static_cast<int>(frequencies_hz_.size()); }
  const std::vector<double>& frequencies_hz() const { return frequencies_hz_; }
  double operator[](int i) const { return frequencies_hz_[static_cast<size_t>(i)]; }

  bool operator==(const FrequencyGrid& other) const {
    return frequencies_hz_ == other.frequencies_hz_;
  }

 private:
  std::vector<double> frequencies_hz_;
};

// 20*log10 of a linear magnitude. Throws on zero or negative input.
double log_magnitude(double h_linear);

// One subject's dense log-magnitude data: D directions x 2 ears x F bins,
// stored row-major as 32-bit floats (dB). Immutable after construction.
class HrtfSet {
 public:
  HrtfSet(std::string subject_id, std::vector<Direction> directions,
          FrequencyGrid freq_grid, double sample_rate_hz,
          std::vector<float> logmag_db);

  const std::string& subject_id() const { return subject_id_; }
  const std::vector<Direction>& directions() const { return directions_; }
  const FrequencyGrid& freq_grid() const { return freq_grid_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  const std::vector<float>& logmag_db() const { return logmag_db_; }

  int num_directions() const { return static_cast<int>(directions_.size()); }
  int num_freqs() const { return freq_grid_.size(); }

  float at(int d, int e, int f) const {
    return logmag_db_[(static_cast<size_t>(d) * kNumEars + e) * num_freqs() + f];
  }

 private:
  std::string subject_id_;
  std::vector<Direction> directions_;
  FrequencyGrid freq_grid_;
  double sample_rate_hz_ = 0.0;
  std::vector<float> logmag_db_;
};

// The measured-direction index subset and its implied complement.
class SparseConfig {
 public:
  // `measured` must be non-empty, duplicate-free, in range, and leave at
  // least one direction unmeasured. Indices are stored sorted.
  SparseConfig(std::vector<int> measured, int num_directions);

  int num_directions() const { return num_directions_; }
  int num_measured() const { return static_cast<int>(measured_.size()); }
  int num_unmeasured() const { return static_cast<int>(unmeasured_.size()); }
  const std::vector<int>& measured() const { return measured_; }
  const std::vector<int>& unmeasured() const { return unmeasured_; }

 private:
  std::vector<int> measured_;
  std::vector<int> unmeasured_;
  int num_directions_ = 0;
};

// Row views of a set split along the direction axis: measured rows (M x 2
// x F, in cfg index order) and unmeasured rows (U x 2 x F).
struct SplitSet {
  std::vector<float> measured;
  std::vector<float> unmeasured;
};

SplitSet split_set(const HrtfSet& set, const SparseConfig& cfg);

// Gathers rows `indices` of a dense D x 2 x F tensor.
template <typename T>
std::vector<T> gather_rows(const std::vector<T>& dense, int num_freqs,
                           const std::vector<int>& indices) {
  const size_t row = static_cast<size_t>(kNumEars) * num_freqs;
  std::vector<T> out;
  out.reserve(indices.size() * row);
  for (int d : indices) {
    const T* src = dense.data() + static_cast<size_t>(d) * row;
    out.insert(out.end(), src, src + row);
  }
  return out;
}

}  // namespace hrtf
