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
//
// FDCKPT01 checkpoint container. Little-endian layout:
//
//   magic "FDCKPT01"
//   u32 config length, config bytes (model config text)
//   u32 epoch
//   f64 validation LSD of the checkpoint
//   u64 optimizer step count, f64 learning rate
//   u32 record count, then per record:
//     u32 name length, name bytes
//     u32 rank, rank x u32 dims
//     numel x f32 values, numel x f32 Adam m, numel x f32 Adam v
//
// Record order is the model's parameter registration order; encode/decode
// round-trips bit-exactly.

#ifndef HRTFKIT_NN_CHECKPOINT_HPP_
#define HRTFKIT_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace hrtf {

struct CheckpointRecord {
  std::string name;
  std::vector<int> shape;
  std::vector<float> values;
  std::vector<float> adam_m;
  std::vector<float> adam_v;
};

struct Checkpoint {
  std::string config_text;
  uint32_t epoch = 0;
  double val_lsd = 0.0;
  uint64_t adam_step = 0;
  double learning_rate = 0.0;
  std::vector<CheckpointRecord> records;
};

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes);

void write_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace hrtf

#endif  // HRTFKIT_NN_CHECKPOINT_HPP_
