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

#include <string>
#include <vector>

#include "core/hrtf_set.hpp"

namespace hrtf {

// HRTFSET1 flat binary container, little-endian throughout:
//
//   magic             8 bytes, "HRTFSET1"
//   subject_id        u32 length + UTF-8 bytes
//   D                 u32
//   F                 u32
//   sample_rate_hz    f64
//   frequencies_hz    F x f64
//   directions        D x (azimuth_deg f64, elevation_deg f64)
//   payload           D*2*F x f32 log-magnitudes, row-major (d, ear, f)
//
// The reader rejects bad magic, count/length mismatches, truncated
// payloads, trailing bytes, and non-finite values with distinct errors.
void write_set(const HrtfSet& set, const std::string& path);
HrtfSet read_set(const std::string& path);

// Serialized bytes without touching the filesystem (used by tests and the
// C API's in-memory paths).
std::vector<unsigned char> encode_set(const HrtfSet& set);
HrtfSet decode_set(const std::vector<unsigned char>& bytes);

// All *.hrtfset files under `dir`, sorted by filename.
std::vector<std::string> list_dataset_files(const std::string& dir);

}  // namespace hrtf
