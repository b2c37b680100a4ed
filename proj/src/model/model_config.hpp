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

#ifndef HRTFKIT_MODEL_MODEL_CONFIG_HPP_
#define HRTFKIT_MODEL_MODEL_CONFIG_HPP_

#include <string>
#include <vector>

namespace hrtf {

enum class Variant {
  kSpatialOnly,
  kPerFreqMlp,
  kVanillaConv,
  kDilatedConv,
  kConformer,
};

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// All five variants in their reporting order.
const std::vector<Variant>& all_variants();

// Upsampler hyperparameters plus the geometry it is built for. Serializes
// to "key = value" text; unknown keys are rejected on parse.
struct ModelConfig {
  int num_measured = 0;    // M, sparse input directions
  int num_directions = 0;  // D, dense output directions
  int num_freqs = 0;       // F, frequency bins
  Variant variant = Variant::kConformer;
  int latent_dim = 128;  // C
  int num_blocks = 4;    // N
  int heads = 8;
  int ffn_dim = 256;
  int conv_kernel = 7;
  int head_hidden = 256;
  double dropout = 0.1;
  // Ablation switches; only meaningful (and only accepted) for the
  // conformer variant.
  bool use_conv = true;
  bool use_posenc = true;
  // Cycled over blocks by the dilated_conv variant.
  std::vector<int> dilations = {1, 2, 4, 8};

  void validate() const;
  std::string to_text() const;
  static ModelConfig from_text(const std::string& text);

  bool operator==(const ModelConfig& other) const = default;
};

}  // namespace hrtf

#endif  // HRTFKIT_MODEL_MODEL_CONFIG_HPP_
