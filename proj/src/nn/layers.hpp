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

#ifndef HRTFKIT_NN_LAYERS_HPP_
#define HRTFKIT_NN_LAYERS_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "nn/tensor.hpp"

namespace hrtf {

template <typename T>
struct NamedParam {
  std::string name;
  TensorPtr<T> tensor;
};

template <typename T>
using ParamList = std::vector<NamedParam<T>>;

// Affine map y = x W^T + b. Weights start Gaussian with std 1/sqrt(fan_in),
// biases at zero.
template <typename T>
struct Dense {
  TensorPtr<T> w;
  TensorPtr<T> b;

  Dense() = default;
  Dense(int in_dim, int out_dim, Rng& rng)
      : w(randn<T>({out_dim, in_dim}, rng, 1.0 / std::sqrt(static_cast<double>(in_dim)))),
        b(zeros<T>({out_dim}, true)) {}

  TensorPtr<T> forward(const TensorPtr<T>& x) const { return linear(x, w, b); }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    out->push_back({prefix + ".w", w});
    out->push_back({prefix + ".b", b});
  }
};

// Layer normalization over the channel axis; gamma starts at 1, beta at 0.
template <typename T>
struct Norm {
  TensorPtr<T> gamma;
  TensorPtr<T> beta;

  Norm() = default;
  explicit Norm(int channels)
      : gamma(make_tensor<T>({channels}, std::vector<T>(static_cast<size_t>(channels), T(1)), true)),
        beta(zeros<T>({channels}, true)) {}

  TensorPtr<T> forward(const TensorPtr<T>& x) const {
    return layer_norm(x, gamma, beta);
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    out->push_back({prefix + ".gamma", gamma});
    out->push_back({prefix + ".beta", beta});
  }
};

// Multi-head self-attention over (F, C). Scale is 1/sqrt(C/heads). The
// optional probs output receives each head's F x F attention rows; it is
// observational only and carries no gradient.
template <typename T>
struct Mhsa {
  int heads = 1;
  Dense<T> wq;
  Dense<T> wk;
  Dense<T> wv;
  Dense<T> wo;

  Mhsa() = default;
  Mhsa(int channels, int num_heads, Rng& rng) : heads(num_heads) {
    if (num_heads < 1 || channels % num_heads != 0) {
      throw_invalid("mhsa: channels must be divisible by heads");
    }
    wq = Dense<T>(channels, channels, rng);
    wk = Dense<T>(channels, channels, rng);
    wv = Dense<T>(channels, channels, rng);
    wo = Dense<T>(channels, channels, rng);
  }

  TensorPtr<T> forward(const TensorPtr<T>& x,
                       std::vector<std::vector<T>>* head_probs = nullptr) const {
    if (x->shape.size() != 2) throw_invalid("mhsa: input must be (F, C)");
    const int channels = x->dim(1);
    const int dh = channels / heads;
    const T att_scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

    TensorPtr<T> q = wq.forward(x);
    TensorPtr<T> k = wk.forward(x);
    TensorPtr<T> v = wv.forward(x);

    if (head_probs) head_probs->assign(static_cast<size_t>(heads), {});
    std::vector<TensorPtr<T>> outs;
    outs.reserve(static_cast<size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      std::vector<T>* probs = head_probs ? &(*head_probs)[static_cast<size_t>(h)] : nullptr;
      outs.push_back(scaled_dot_attention(slice_cols(q, h * dh, dh),
                                          slice_cols(k, h * dh, dh),
                                          slice_cols(v, h * dh, dh), att_scale, probs));
    }
    return wo.forward(concat_cols(outs));
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    wq.collect(prefix + ".wq", out);
    wk.collect(prefix + ".wk", out);
    wv.collect(prefix + ".wv", out);
    wo.collect(prefix + ".wo", out);
  }
};

// Length-preserving 1-D convolution along the frequency axis. Depthwise
// kernels are (C, k) with fan_in k; full kernels are (C_out, C_in, k) with
// fan_in C_in * k.
template <typename T>
struct Conv {
  TensorPtr<T> w;
  TensorPtr<T> b;
  int dilation = 1;
  bool depthwise = false;

  Conv() = default;
  Conv(int ch_in, int ch_out, int kernel, int dil, bool dw, Rng& rng)
      : dilation(dil), depthwise(dw) {
    if (dw) {
      if (ch_in != ch_out) throw_invalid("conv: depthwise requires C_in == C_out");
      w = randn<T>({ch_in, kernel}, rng, 1.0 / std::sqrt(static_cast<double>(kernel)));
    } else {
      w = randn<T>({ch_out, ch_in, kernel}, rng,
                   1.0 / std::sqrt(static_cast<double>(ch_in) * kernel));
    }
    b = zeros<T>({ch_out}, true);
  }

  TensorPtr<T> forward(const TensorPtr<T>& x) const {
    return conv1d(x, w, b, dilation, depthwise);
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    out->push_back({prefix + ".w", w});
    out->push_back({prefix + ".b", b});
  }
};

// Learnable additive frequency positional table, Gaussian init std 0.02.
template <typename T>
struct PosEmbedding {
  TensorPtr<T> table;

  PosEmbedding() = default;
  PosEmbedding(int num_freqs, int channels, Rng& rng)
      : table(randn<T>({num_freqs, channels}, rng, 0.02)) {}

  TensorPtr<T> forward(const TensorPtr<T>& x) const { return add(x, table); }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    out->push_back({prefix + ".table", table});
  }
};

}  // namespace hrtf

#endif  // HRTFKIT_NN_LAYERS_HPP_
