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

#ifndef HRTFKIT_NN_GRADCHECK_HPP_
#define HRTFKIT_NN_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>
#include <vector>

#include "nn/layers.hpp"

namespace hrtf {

// Central-difference gradient verification, 64-bit only. The closure must
// rebuild the forward graph on every call and return a scalar; parameters
// are perturbed in place and restored. Tensors larger than max_coords are
// subsampled (seeded) down to max_coords coordinates.
//
// Relative error uses denominator max(|analytic|, |numeric|, 1e-3): the
// floor keeps finite-difference roundoff on near-zero coordinates from
// registering as error while still exposing any wrong backward formula.
inline double grad_check(const std::function<TensorPtr<double>()>& closure,
                         const ParamList<double>& params, double h = 1e-6,
                         uint64_t seed = 0, size_t max_coords = 64) {
  for (const auto& p : params) p.tensor->zero_grad();
  {
    TensorPtr<double> root = closure();
    backward(root);
  }
  std::vector<std::vector<double>> analytic(params.size());
  for (size_t i = 0; i < params.size(); ++i) analytic[i] = params[i].tensor->grad;

  double max_rel = 0.0;
  Rng rng(seed ^ 0x67726164636865ULL);
  for (size_t i = 0; i < params.size(); ++i) {
    TensorNode<double>& p = *params[i].tensor;
    std::vector<size_t> coords;
    if (p.numel() <= max_coords) {
      coords.resize(p.numel());
      for (size_t j = 0; j < coords.size(); ++j) coords[j] = j;
    } else {
      std::unordered_set<size_t> picked;
      while (picked.size() < max_coords) {
        picked.insert(static_cast<size_t>(rng.next_double() * static_cast<double>(p.numel())));
      }
      coords.assign(picked.begin(), picked.end());
      std::sort(coords.begin(), coords.end());
    }
    for (size_t j : coords) {
      const double saved = p.values[j];
      p.values[j] = saved + h;
      const double f_plus = closure()->values[0];
      p.values[j] = saved - h;
      const double f_minus = closure()->values[0];
      p.values[j] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double a = analytic[i][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-3});
      max_rel = std::max(max_rel, std::abs(a - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace hrtf

#endif  // HRTFKIT_NN_GRADCHECK_HPP_
