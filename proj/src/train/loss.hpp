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

#ifndef HRTFKIT_TRAIN_LOSS_HPP_
#define HRTFKIT_TRAIN_LOSS_HPP_

#include "nn/tensor.hpp"

namespace hrtf {

namespace loss_detail {

template <typename T>
void check_pair(const TensorPtr<T>& pred, const TensorPtr<T>& truth) {
  if (pred->shape != truth->shape) throw_invalid("loss: shape mismatch");
  if (pred->shape.size() != 3 || pred->dim(1) != 2) {
    throw_invalid("loss: inputs must be (D, 2, F)");
  }
}

}  // namespace loss_detail

// Mean log-spectral distance over all (direction, ear) pairs:
// (1/(2D)) sum sqrt((1/F) sum_f (pred - truth)^2). Training supervises the
// full dense set, unlike evaluation metrics which see unmeasured rows only.
template <typename T>
TensorPtr<T> loss_lsd(const TensorPtr<T>& pred, const TensorPtr<T>& truth) {
  loss_detail::check_pair(pred, truth);
  TensorPtr<T> diff = sub(pred, truth);
  return mean_all(sqrt_t(mean_last(mul(diff, diff))));
}

// Spectral-gradient loss: mean absolute difference of adjacent-bin first
// differences, normalized by 2D(F-1). Zero whenever pred and truth differ
// by per-(direction, ear) constants.
template <typename T>
TensorPtr<T> loss_sgl(const TensorPtr<T>& pred, const TensorPtr<T>& truth) {
  loss_detail::check_pair(pred, truth);
  if (pred->shape.back() < 2) throw_invalid("loss_sgl: needs at least 2 bins");
  return mean_all(abs_t(sub(delta_last(pred), delta_last(truth))));
}

// loss_lsd + beta * loss_sgl. beta == 0 returns the LSD node itself, so
// the two are bitwise identical in that configuration.
template <typename T>
TensorPtr<T> loss_total(const TensorPtr<T>& pred, const TensorPtr<T>& truth,
                        double beta) {
  if (beta < 0.0) throw_invalid("loss_total: beta must be >= 0");
  TensorPtr<T> lsd = loss_lsd(pred, truth);
  if (beta == 0.0) return lsd;
  return add(lsd, scale(loss_sgl(pred, truth), static_cast<T>(beta)));
}

}  // namespace hrtf

#endif  // HRTFKIT_TRAIN_LOSS_HPP_
