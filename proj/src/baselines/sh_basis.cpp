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

#include "baselines/sh_basis.hpp"

#include <cmath>

#include "core/error.hpp"

namespace hrtf {

ShBasis::ShBasis(int l_max) : l_max_(l_max) {
  if (l_max < 0 || l_max > 64) {
    throw_invalid("ShBasis: l_max must be in [0, 64]");
  }
}

std::vector<double> ShBasis::row(const Direction& d) const {
  const int L = l_max_;
  const int n = n_basis();
  std::vector<double> out(static_cast<size_t>(n));

  const double x = std::sin(deg2rad(d.elevation_deg()));   // cos(colatitude)
  const double s = std::cos(deg2rad(d.elevation_deg()));   // sin(colatitude)
  const double az = deg2rad(d.azimuth_deg());

  // Fully normalized associated Legendre values P̄_l^m(x) via the
  // standard three-term recurrence; P̄ already includes the
  // sqrt((2l+1)(l-m)!/(4pi (l+m)!)) factor, so no raw factorials appear.
  std::vector<double> pbar(static_cast<size_t>((L + 1) * (L + 2) / 2));
  auto P = [&pbar, L](int l, int m) -> double& {
    return pbar[static_cast<size_t>(l * (l + 1) / 2 + m)];
  };

  P(0, 0) = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 1; m <= L; ++m) {
    P(m, m) = P(m - 1, m - 1) * s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  }
  for (int m = 0; m < L; ++m) {
    P(m + 1, m) = x * std::sqrt(2.0 * m + 3.0) * P(m, m);
  }
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      const double a =
          std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt(((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - m * m)) /
                                 ((2.0 * l - 3.0) * (static_cast<double>(l) * l - m * m)));
      P(l, m) = a * x * P(l - 1, m) - b * P(l - 2, m);
    }
  }

  const double sqrt2 = std::sqrt(2.0);
  for (int l = 0; l <= L; ++l) {
    out[static_cast<size_t>(l * (l + 1))] = P(l, 0);
    for (int m = 1; m <= l; ++m) {
      const double p = sqrt2 * P(l, m);
      out[static_cast<size_t>(l * (l + 1) + m)] = p * std::cos(m * az);
      out[static_cast<size_t>(l * (l + 1) - m)] = p * std::sin(m * az);
    }
  }
  return out;
}

Eigen::MatrixXd ShBasis::matrix(const std::vector<Direction>& dirs) const {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(dirs.size()), n_basis());
  for (size_t i = 0; i < dirs.size(); ++i) {
    const std::vector<double> r = row(dirs[i]);
    for (int j = 0; j < n_basis(); ++j) {
      phi(static_cast<Eigen::Index>(i), j) = r[static_cast<size_t>(j)];
    }
  }
  return phi;
}

ShCoefficients sh_fit(const std::vector<Direction>& measured_dirs,
                      const std::vector<double>& measured, int num_freqs,
                      int l_max, double lambda) {
  const int m_count = static_cast<int>(measured_dirs.size());
  if (m_count < 1) throw_invalid("sh_fit: need at least one measurement");
  if (lambda < 0.0) throw_invalid("sh_fit: lambda must be >= 0");
  if (measured.size() != static_cast<size_t>(m_count) * 2 * num_freqs) {
    throw_invalid("sh_fit: measured size does not match M*2*F");
  }

  const ShBasis basis(l_max);
  const int n = basis.n_basis();
  if (lambda == 0.0 && m_count < n) {
    throw Error(ErrorCode::kNumeric,
                "sh_fit: unregularized fit needs M >= (l_max+1)^2, got M=" +
                    std::to_string(m_count) + " for l_max=" +
                    std::to_string(l_max));
  }

  const Eigen::MatrixXd phi = basis.matrix(measured_dirs);
  Eigen::MatrixXd gram = phi.transpose() * phi;
  if (lambda > 0.0) {
    gram.diagonal().array() += lambda;
  } else {
    const auto qr = phi.colPivHouseholderQr();
    if (qr.rank() < n) {
      throw Error(ErrorCode::kNumeric,
                  "sh_fit: rank-deficient system (rank " +
                      std::to_string(qr.rank()) + " < " + std::to_string(n) +
                      ") for l_max=" + std::to_string(l_max) + ", M=" +
                      std::to_string(m_count));
    }
  }

  // One factorization serves every (ear, frequency) column; the columns
  // are independent, so results do not depend on evaluation order.
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumeric, "sh_fit: factorization failed");
  }

  Eigen::MatrixXd rhs(m_count, 2 * num_freqs);
  for (int d = 0; d < m_count; ++d) {
    for (int e = 0; e < 2; ++e) {
      for (int f = 0; f < num_freqs; ++f) {
        rhs(d, e * num_freqs + f) =
            measured[(static_cast<size_t>(d) * 2 + e) * num_freqs + f];
      }
    }
  }
  const Eigen::MatrixXd sol = ldlt.solve(phi.transpose() * rhs);

  ShCoefficients out;
  out.l_max = l_max;
  out.n_basis = n;
  out.num_freqs = num_freqs;
  out.a.resize(static_cast<size_t>(n) * 2 * num_freqs);
  for (int i = 0; i < n; ++i) {
    for (int e = 0; e < 2; ++e) {
      for (int f = 0; f < num_freqs; ++f) {
        out.a[(static_cast<size_t>(i) * 2 + e) * num_freqs + f] =
            sol(i, e * num_freqs + f);
      }
    }
  }
  return out;
}

std::vector<double> sh_eval(const ShCoefficients& coeffs,
                            const std::vector<Direction>& targets) {
  const ShBasis basis(coeffs.l_max);
  if (coeffs.n_basis != basis.n_basis() ||
      coeffs.a.size() !=
          static_cast<size_t>(coeffs.n_basis) * 2 * coeffs.num_freqs) {
    throw_invalid("sh_eval: inconsistent coefficient block");
  }
  const Eigen::MatrixXd phi = basis.matrix(targets);
  const int F = coeffs.num_freqs;

  std::vector<double> out(targets.size() * 2 * static_cast<size_t>(F), 0.0);
  for (size_t t = 0; t < targets.size(); ++t) {
    for (int i = 0; i < coeffs.n_basis; ++i) {
      const double p = phi(static_cast<Eigen::Index>(t), i);
      const double* c = coeffs.a.data() + static_cast<size_t>(i) * 2 * F;
      double* o = out.data() + static_cast<size_t>(t) * 2 * F;
      for (int k = 0; k < 2 * F; ++k) o[k] += p * c[k];
    }
  }
  return out;
}

}  // namespace hrtf
