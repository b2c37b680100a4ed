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

#include <Eigen/Dense>
#include <vector>

#include "core/direction.hpp"

namespace hrtf {

// Real orthonormal spherical harmonics, Condon-Shortley-free. Linear
// index n = l*(l+1) + m for degree l and order m in [-l, l], so a basis
// of order l_max has (l_max+1)^2 functions. Normalization is unit L2
// norm over the sphere: the n=0 function is the constant 1/sqrt(4*pi).
class ShBasis {
 public:
  explicit ShBasis(int l_max);

  int l_max() const { return l_max_; }
  int n_basis() const { return (l_max_ + 1) * (l_max_ + 1); }

  // One row of basis values for a single direction.
  std::vector<double> row(const Direction& d) const;

  // Dense evaluation matrix, n_dirs x n_basis. Nothing is cached;
  // callers reuse the matrix across fits on the same directions.
  Eigen::MatrixXd matrix(const std::vector<Direction>& dirs) const;

 private:
  int l_max_;
};

// Coefficients of a fitted expansion: n_basis x 2 x F, row-major.
struct ShCoefficients {
  int l_max = 0;
  int n_basis = 0;
  int num_freqs = 0;
  std::vector<double> a;

  double at(int n, int e, int f) const {
    return a[(static_cast<size_t>(n) * 2 + e) * num_freqs + f];
  }
};

// Ridge-regularized least-squares fit of measured spectra (M x 2 x F)
// onto the basis, solved per (ear, frequency) through the normal
// equations with an LDLT factorization shared across all right-hand
// sides. With lambda == 0 the sample matrix must have full column rank,
// which requires M >= (l_max+1)^2.
ShCoefficients sh_fit(const std::vector<Direction>& measured_dirs,
                      const std::vector<double>& measured, int num_freqs,
                      int l_max, double lambda);

// Expansion evaluation at target directions; returns U x 2 x F.
std::vector<double> sh_eval(const ShCoefficients& coeffs,
                            const std::vector<Direction>& targets);

}  // namespace hrtf
