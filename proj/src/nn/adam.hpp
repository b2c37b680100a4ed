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

#ifndef HRTFKIT_NN_ADAM_HPP_
#define HRTFKIT_NN_ADAM_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "nn/layers.hpp"

namespace hrtf {

// Bias-corrected Adam. Moment buffers are allocated on the first step and
// stay index-aligned with the parameter list, which therefore must keep a
// stable order across steps (checkpointing relies on the same order).
template <typename T>
class Adam {
 public:
  explicit Adam(double learning_rate)
      : lr_(learning_rate) {}

  void step(const ParamList<T>& params) {
    if (m_.empty()) {
      m_.resize(params.size());
      v_.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        m_[i].assign(params[i].tensor->numel(), T(0));
        v_[i].assign(params[i].tensor->numel(), T(0));
      }
    }
    if (m_.size() != params.size()) {
      throw_invalid("adam: parameter list size changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
      TensorNode<T>& p = *params[i].tensor;
      if (p.grad.size() != p.values.size()) {
        throw_invalid("adam: parameter has no gradient: " + params[i].name);
      }
      for (size_t j = 0; j < p.values.size(); ++j) {
        const double g = static_cast<double>(p.grad[j]);
        if (!std::isfinite(g)) {
          throw_numeric("non-finite gradient in parameter " + params[i].name);
        }
        const double m = kBeta1 * static_cast<double>(m_[i][j]) + (1.0 - kBeta1) * g;
        const double v = kBeta2 * static_cast<double>(v_[i][j]) + (1.0 - kBeta2) * g * g;
        m_[i][j] = static_cast<T>(m);
        v_[i][j] = static_cast<T>(v);
        const double update = lr_ * (m / bc1) / (std::sqrt(v / bc2) + kEps);
        p.values[j] = static_cast<T>(static_cast<double>(p.values[j]) - update);
      }
    }
  }

  uint64_t step_count() const { return t_; }
  double learning_rate() const { return lr_; }
  const std::vector<std::vector<T>>& first_moments() const { return m_; }
  const std::vector<std::vector<T>>& second_moments() const { return v_; }

  // Restores optimizer state from a checkpoint; buffer order must match the
  // parameter list used for subsequent steps.
  void restore(uint64_t t, std::vector<std::vector<T>> m, std::vector<std::vector<T>> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

 private:
  double lr_ = 1e-3;
  uint64_t t_ = 0;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
};

}  // namespace hrtf

#endif  // HRTFKIT_NN_ADAM_HPP_
