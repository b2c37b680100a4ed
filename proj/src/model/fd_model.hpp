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
// Sparse-to-dense log-magnitude upsampler. Two branches are summed:
//
//   spatial: one affine map 2M -> 2D shared across frequency bins
//   frequency: binaural representation (L, R, L-R stacked, 3M x F)
//     -> linear 3M -> C per bin -> optional positional table -> variant
//     core over (F, C) -> per-bin expansion head C -> head_hidden -> 2D
//
// Variant cores: pointwise MLP stacks, depthwise+pointwise conv blocks
// (optionally dilated), or conformer blocks. The conv stage inside the
// conformer uses layer normalization where the cited design uses batch
// normalization; this keeps evaluation batch-size-independent.

#ifndef HRTFKIT_MODEL_FD_MODEL_HPP_
#define HRTFKIT_MODEL_FD_MODEL_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "model/model_config.hpp"
#include "nn/adam.hpp"
#include "nn/checkpoint.hpp"
#include "nn/layers.hpp"
#include "nn/tensor.hpp"

namespace hrtf {

template <typename T>
struct ForwardTrace {
  TensorPtr<T> spatial;  // D x 2 x F
  TensorPtr<T> freq;     // D x 2 x F, zeros for spatial_only
  TensorPtr<T> sum;      // spatial + freq, elementwise
};

namespace model_detail {

// Pre-norm feed-forward: LN -> C -> ffn_dim -> C with swish and dropout.
template <typename T>
struct FeedForward {
  Norm<T> norm;
  Dense<T> lin1;
  Dense<T> lin2;

  FeedForward() = default;
  FeedForward(int channels, int ffn_dim, Rng& rng)
      : norm(channels), lin1(channels, ffn_dim, rng), lin2(ffn_dim, channels, rng) {}

  TensorPtr<T> forward(const TensorPtr<T>& x, double p, bool training, Rng& rng) const {
    TensorPtr<T> h = swish(lin1.forward(norm.forward(x)));
    h = dropout(h, p, training, rng);
    h = lin2.forward(h);
    return dropout(h, p, training, rng);
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    norm.collect(prefix + ".norm", out);
    lin1.collect(prefix + ".lin1", out);
    lin2.collect(prefix + ".lin2", out);
  }
};

// Pre-norm self-attention with output dropout.
template <typename T>
struct AttentionModule {
  Norm<T> norm;
  Mhsa<T> mhsa;

  AttentionModule() = default;
  AttentionModule(int channels, int heads, Rng& rng)
      : norm(channels), mhsa(channels, heads, rng) {}

  TensorPtr<T> forward(const TensorPtr<T>& x, double p, bool training, Rng& rng) const {
    return dropout(mhsa.forward(norm.forward(x)), p, training, rng);
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    norm.collect(prefix + ".norm", out);
    mhsa.collect(prefix + ".mhsa", out);
  }
};

// Conv stage: pre-norm -> pointwise to 2C -> GLU -> depthwise -> LN ->
// swish -> pointwise to C -> dropout.
template <typename T>
struct ConvModule {
  Norm<T> norm;
  Dense<T> pw1;
  Conv<T> dw;
  Norm<T> mid_norm;
  Dense<T> pw2;

  ConvModule() = default;
  ConvModule(int channels, int kernel, Rng& rng)
      : norm(channels),
        pw1(channels, 2 * channels, rng),
        dw(channels, channels, kernel, 1, true, rng),
        mid_norm(channels),
        pw2(channels, channels, rng) {}

  TensorPtr<T> forward(const TensorPtr<T>& x, double p, bool training, Rng& rng) const {
    TensorPtr<T> h = glu(pw1.forward(norm.forward(x)));
    h = swish(mid_norm.forward(dw.forward(h)));
    h = pw2.forward(h);
    return dropout(h, p, training, rng);
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    norm.collect(prefix + ".norm", out);
    pw1.collect(prefix + ".pw1", out);
    dw.collect(prefix + ".dw", out);
    mid_norm.collect(prefix + ".mid_norm", out);
    pw2.collect(prefix + ".pw2", out);
  }
};

// H1 = H + 1/2 FFN(H); H2 = H1 + MHSA(H1); H3 = H2 + Conv(H2);
// H4 = H3 + 1/2 FFN(H3); out = LayerNorm(H4). With use_conv=false the
// conv stage is absent entirely (no parameters), so H3 == H2.
template <typename T>
struct ConformerBlock {
  FeedForward<T> ffn1;
  AttentionModule<T> attn;
  std::optional<ConvModule<T>> conv;
  FeedForward<T> ffn2;
  Norm<T> out_norm;

  ConformerBlock() = default;
  ConformerBlock(int channels, int ffn_dim, int heads, int kernel, bool use_conv,
                 Rng& rng)
      : ffn1(channels, ffn_dim, rng), attn(channels, heads, rng) {
    if (use_conv) conv.emplace(channels, kernel, rng);
    ffn2 = FeedForward<T>(channels, ffn_dim, rng);
    out_norm = Norm<T>(channels);
  }

  TensorPtr<T> forward(const TensorPtr<T>& h, double p, bool training, Rng& rng) const {
    TensorPtr<T> h1 = add(h, scale(ffn1.forward(h, p, training, rng), T(0.5)));
    TensorPtr<T> h2 = add(h1, attn.forward(h1, p, training, rng));
    TensorPtr<T> h3 = conv ? add(h2, conv->forward(h2, p, training, rng)) : h2;
    TensorPtr<T> h4 = add(h3, scale(ffn2.forward(h3, p, training, rng), T(0.5)));
    return out_norm.forward(h4);
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    ffn1.collect(prefix + ".ffn1", out);
    attn.collect(prefix + ".attn", out);
    if (conv) conv->collect(prefix + ".conv", out);
    ffn2.collect(prefix + ".ffn2", out);
    out_norm.collect(prefix + ".out_norm", out);
  }
};

// Pointwise two-layer MLP, no residual: lin2(swish(lin1(x))).
template <typename T>
struct MlpBlock {
  Dense<T> lin1;
  Dense<T> lin2;

  MlpBlock() = default;
  MlpBlock(int channels, int ffn_dim, Rng& rng)
      : lin1(channels, ffn_dim, rng), lin2(ffn_dim, channels, rng) {}

  TensorPtr<T> forward(const TensorPtr<T>& x) const {
    return lin2.forward(swish(lin1.forward(x)));
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    lin1.collect(prefix + ".lin1", out);
    lin2.collect(prefix + ".lin2", out);
  }
};

// x + swish(pointwise(depthwise(norm(x)))), dilation per block.
template <typename T>
struct ConvBlock {
  Norm<T> norm;
  Conv<T> dw;
  Dense<T> pw;

  ConvBlock() = default;
  ConvBlock(int channels, int kernel, int dilation, Rng& rng)
      : norm(channels), dw(channels, channels, kernel, dilation, true, rng),
        pw(channels, channels, rng) {}

  TensorPtr<T> forward(const TensorPtr<T>& x) const {
    return add(x, swish(pw.forward(dw.forward(norm.forward(x)))));
  }

  void collect(const std::string& prefix, ParamList<T>* out) const {
    norm.collect(prefix + ".norm", out);
    dw.collect(prefix + ".dw", out);
    pw.collect(prefix + ".pw", out);
  }
};

}  // namespace model_detail

template <typename T>
class FdModel {
 public:
  FdModel(const ModelConfig& cfg, uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(seed);
    const int m = cfg_.num_measured;
    const int d = cfg_.num_directions;
    const int c = cfg_.latent_dim;

    spatial_ = Dense<T>(2 * m, 2 * d, rng);
    if (cfg_.variant == Variant::kSpatialOnly) return;

    proj_ = Dense<T>(3 * m, c, rng);
    if (cfg_.use_posenc) posenc_.emplace(cfg_.num_freqs, c, rng);
    for (int n = 0; n < cfg_.num_blocks; ++n) {
      switch (cfg_.variant) {
        case Variant::kPerFreqMlp:
          mlp_blocks_.emplace_back(c, cfg_.ffn_dim, rng);
          break;
        case Variant::kVanillaConv:
          conv_blocks_.emplace_back(c, cfg_.conv_kernel, 1, rng);
          break;
        case Variant::kDilatedConv:
          conv_blocks_.emplace_back(
              c, cfg_.conv_kernel,
              cfg_.dilations[static_cast<size_t>(n) % cfg_.dilations.size()], rng);
          break;
        case Variant::kConformer:
          conformer_blocks_.emplace_back(c, cfg_.ffn_dim, cfg_.heads,
                                         cfg_.conv_kernel, cfg_.use_conv, rng);
          break;
        case Variant::kSpatialOnly:
          throw_internal("unreachable");
      }
    }
    head1_ = Dense<T>(c, cfg_.head_hidden, rng);
    head2_ = Dense<T>(cfg_.head_hidden, 2 * d, rng);
  }

  const ModelConfig& config() const { return cfg_; }

  // Parameters in registration order; this order is the checkpoint record
  // order and the optimizer buffer order.
  ParamList<T> parameters() const {
    ParamList<T> out;
    spatial_.collect("spatial", &out);
    if (cfg_.variant != Variant::kSpatialOnly) {
      proj_.collect("freq.proj", &out);
      if (posenc_) posenc_->collect("freq.posenc", &out);
      for (size_t n = 0; n < num_blocks_built(); ++n) {
        const std::string prefix = "freq.block" + std::to_string(n);
        switch (cfg_.variant) {
          case Variant::kPerFreqMlp: mlp_blocks_[n].collect(prefix, &out); break;
          case Variant::kVanillaConv:
          case Variant::kDilatedConv: conv_blocks_[n].collect(prefix, &out); break;
          case Variant::kConformer: conformer_blocks_[n].collect(prefix, &out); break;
          case Variant::kSpatialOnly: break;
        }
      }
      head1_.collect("freq.head.lin1", &out);
      head2_.collect("freq.head.lin2", &out);
    }
    return out;
  }

  size_t parameter_count() const {
    size_t n = 0;
    for (const NamedParam<T>& p : parameters()) n += p.tensor->numel();
    return n;
  }

  // x: (M, 2, F). Dropout draws from rng only in training mode.
  ForwardTrace<T> forward(const TensorPtr<T>& x, bool training, Rng& rng) const {
    check_input(x);
    ForwardTrace<T> trace;
    trace.spatial = spatial_branch(x);
    if (cfg_.variant == Variant::kSpatialOnly) {
      trace.freq = zeros<T>({cfg_.num_directions, 2, cfg_.num_freqs});
    } else {
      trace.freq = head_from_latent(latent(x, training, rng));
    }
    trace.sum = add(trace.spatial, trace.freq);
    return trace;
  }

  // Deterministic inference.
  ForwardTrace<T> predict(const TensorPtr<T>& x) const {
    Rng rng(0);
    return forward(x, false, rng);
  }

  // Pre-head latent of the frequency branch, (F, C), inference mode.
  TensorPtr<T> freq_latent(const TensorPtr<T>& x) const {
    if (cfg_.variant == Variant::kSpatialOnly) {
      throw_invalid("freq_latent: spatial_only has no frequency branch");
    }
    check_input(x);
    Rng rng(0);
    return latent(x, false, rng);
  }

 private:
  size_t num_blocks_built() const {
    return std::max({mlp_blocks_.size(), conv_blocks_.size(), conformer_blocks_.size()});
  }

  void check_input(const TensorPtr<T>& x) const {
    const std::vector<int> want = {cfg_.num_measured, 2, cfg_.num_freqs};
    if (x->shape != want) throw_invalid("model forward: input must be (M, 2, F)");
  }

  TensorPtr<T> spatial_branch(const TensorPtr<T>& x) const {
    const int m = cfg_.num_measured;
    const int d = cfg_.num_directions;
    const int f = cfg_.num_freqs;
    TensorPtr<T> per_bin = transpose2d(reshape(x, {2 * m, f}));  // F x 2M
    TensorPtr<T> mapped = spatial_.forward(per_bin);             // F x 2D
    return reshape(transpose2d(mapped), {d, 2, f});
  }

  TensorPtr<T> latent(const TensorPtr<T>& x, bool training, Rng& rng) const {
    TensorPtr<T> h = proj_.forward(transpose2d(binaural_repr(x)));  // F x C
    if (posenc_) h = posenc_->forward(h);
    const double p = cfg_.dropout;
    for (size_t n = 0; n < num_blocks_built(); ++n) {
      switch (cfg_.variant) {
        case Variant::kPerFreqMlp: h = mlp_blocks_[n].forward(h); break;
        case Variant::kVanillaConv:
        case Variant::kDilatedConv: h = conv_blocks_[n].forward(h); break;
        case Variant::kConformer:
          h = conformer_blocks_[n].forward(h, p, training, rng);
          break;
        case Variant::kSpatialOnly: throw_internal("unreachable");
      }
    }
    return h;
  }

  TensorPtr<T> head_from_latent(const TensorPtr<T>& h) const {
    TensorPtr<T> out = head2_.forward(swish(head1_.forward(h)));  // F x 2D
    return reshape(transpose2d(out), {cfg_.num_directions, 2, cfg_.num_freqs});
  }

  ModelConfig cfg_;
  Dense<T> spatial_;
  Dense<T> proj_;
  std::optional<PosEmbedding<T>> posenc_;
  std::vector<model_detail::MlpBlock<T>> mlp_blocks_;
  std::vector<model_detail::ConvBlock<T>> conv_blocks_;
  std::vector<model_detail::ConformerBlock<T>> conformer_blocks_;
  Dense<T> head1_;
  Dense<T> head2_;
};

// ---------------------------------------------------------------------------
// Checkpoint bridging
// ---------------------------------------------------------------------------

// Snapshot of model weights plus optimizer state. A null or never-stepped
// optimizer writes zero moments.
template <typename T>
Checkpoint make_checkpoint(const FdModel<T>& model, const Adam<T>* opt,
                           uint32_t epoch, double val_lsd) {
  Checkpoint ckpt;
  ckpt.config_text = model.config().to_text();
  ckpt.epoch = epoch;
  ckpt.val_lsd = val_lsd;
  ckpt.adam_step = opt ? opt->step_count() : 0;
  ckpt.learning_rate = opt ? opt->learning_rate() : 0.0;

  const ParamList<T> params = model.parameters();
  const bool have_moments = opt && !opt->first_moments().empty();
  if (have_moments && opt->first_moments().size() != params.size()) {
    throw_invalid("checkpoint: optimizer state does not match the parameter list");
  }
  ckpt.records.reserve(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    CheckpointRecord rec;
    rec.name = params[i].name;
    rec.shape = params[i].tensor->shape;
    const std::vector<T>& values = params[i].tensor->values;
    rec.values.assign(values.begin(), values.end());
    if (have_moments) {
      rec.adam_m.assign(opt->first_moments()[i].begin(), opt->first_moments()[i].end());
      rec.adam_v.assign(opt->second_moments()[i].begin(), opt->second_moments()[i].end());
    } else {
      rec.adam_m.assign(values.size(), 0.0F);
      rec.adam_v.assign(values.size(), 0.0F);
    }
    ckpt.records.push_back(std::move(rec));
  }
  return ckpt;
}

// Loads weights (and optimizer state when opt is non-null) into a model
// built from the same config. Records must match the model's parameter
// list in order, name, and shape.
template <typename T>
void apply_checkpoint(const Checkpoint& ckpt, const FdModel<T>& model, Adam<T>* opt) {
  const ParamList<T> params = model.parameters();
  if (ckpt.records.size() != params.size()) {
    throw_format("checkpoint: expected " + std::to_string(params.size()) +
                 " records, found " + std::to_string(ckpt.records.size()));
  }
  std::vector<std::vector<T>> m(params.size());
  std::vector<std::vector<T>> v(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    const CheckpointRecord& rec = ckpt.records[i];
    if (rec.name != params[i].name || rec.shape != params[i].tensor->shape) {
      throw_format("checkpoint: record \"" + rec.name +
                   "\" does not match parameter \"" + params[i].name + "\"");
    }
    std::vector<T>& values = params[i].tensor->values;
    for (size_t j = 0; j < values.size(); ++j) values[j] = static_cast<T>(rec.values[j]);
    if (opt) {
      m[i].assign(rec.adam_m.begin(), rec.adam_m.end());
      v[i].assign(rec.adam_v.begin(), rec.adam_v.end());
    }
  }
  if (opt) opt->restore(ckpt.adam_step, std::move(m), std::move(v));
}

}  // namespace hrtf

#endif  // HRTFKIT_MODEL_FD_MODEL_HPP_
