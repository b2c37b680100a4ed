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

#include "dataio/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "baselines/sh_basis.hpp"
#include "core/direction.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace hrtf {

namespace {

constexpr double kFieldScaleDb = 5.0;
constexpr double kPerturbScaleDb = 1.0;
constexpr double kSampleRateHz = 48000.0;

// Smooth multiplicative envelope over normalized frequency, near 1.
struct Envelope {
  std::array<double, 3> amp;
  std::array<double, 3> phase;

  static Envelope draw(Rng& rng) {
    Envelope env;
    for (int k = 0; k < 3; ++k) {
      env.amp[static_cast<size_t>(k)] = rng.next_gaussian() * 0.15 / (k + 1);
      env.phase[static_cast<size_t>(k)] = rng.next_double() * 2.0 * kPi;
    }
    return env;
  }

  double at(double x) const {
    double v = 1.0;
    for (int k = 0; k < 3; ++k) {
      v += amp[static_cast<size_t>(k)] *
           std::cos(kPi * (k + 1) * x + phase[static_cast<size_t>(k)]);
    }
    return v;
  }
};

struct Notch {
  double depth_db;
  double width_bins;
  double center_bin;      // at elevation 0
  double slope_bins;      // added at elevation +90 deg, subtracted at -90
};

// SH field coefficients with a 1/(1+n^2) decay over the flat index.
std::vector<double> draw_field(Rng& rng, int n_basis, double scale) {
  std::vector<double> a(static_cast<size_t>(n_basis));
  for (int n = 0; n < n_basis; ++n) {
    a[static_cast<size_t>(n)] =
        scale * rng.next_gaussian() / (1.0 + static_cast<double>(n) * n);
  }
  return a;
}

double eval_field(const std::vector<double>& coeffs,
                  const std::vector<double>& basis_row) {
  double v = 0.0;
  for (size_t n = 0; n < coeffs.size(); ++n) v += coeffs[n] * basis_row[n];
  return v;
}

Direction mirror_azimuth(const Direction& d) {
  return Direction(std::fmod(360.0 - d.azimuth_deg(), 360.0), d.elevation_deg());
}

}  // namespace

std::vector<HrtfSet> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_subjects < 1) throw_invalid("generate_synthetic: n_subjects must be >= 1");
  if (spec.num_directions < 8) throw_invalid("generate_synthetic: D must be >= 8");
  if (spec.num_freqs < 8) throw_invalid("generate_synthetic: F must be >= 8");
  if (spec.sh_order < 0) throw_invalid("generate_synthetic: sh_order must be >= 0");
  if (spec.notch_count < 0) throw_invalid("generate_synthetic: notch_count must be >= 0");

  const int num_dirs = static_cast<int>(spec.num_directions);
  const int num_freqs = static_cast<int>(spec.num_freqs);
  const std::vector<Direction> dirs = fibonacci_sphere(num_dirs);

  // Retained FFT bins 1..F of a size-(2F+2) transform at 48 kHz.
  const FrequencyGrid grid = FrequencyGrid::from_fft_bins(
      kSampleRateHz, 2 * num_freqs + 2, 1, num_freqs);

  const ShBasis basis(spec.sh_order);
  std::vector<std::vector<double>> rows(static_cast<size_t>(num_dirs));
  std::vector<std::vector<double>> mirrored_rows(static_cast<size_t>(num_dirs));
  for (int d = 0; d < num_dirs; ++d) {
    rows[static_cast<size_t>(d)] = basis.row(dirs[static_cast<size_t>(d)]);
    mirrored_rows[static_cast<size_t>(d)] =
        basis.row(mirror_azimuth(dirs[static_cast<size_t>(d)]));
  }

  std::vector<HrtfSet> sets;
  sets.reserve(spec.n_subjects);
  Rng root(spec.seed);
  for (uint32_t s = 0; s < spec.n_subjects; ++s) {
    Rng rng = root.fork(s);

    const std::vector<double> field = draw_field(rng, basis.n_basis(), kFieldScaleDb);
    const Envelope env = Envelope::draw(rng);
    std::vector<Notch> notches(static_cast<size_t>(spec.notch_count));
    for (Notch& n : notches) {
      n.depth_db = 12.0 + 6.0 * rng.next_double();
      n.width_bins = 1.2 + 0.6 * rng.next_double();
      n.center_bin = (0.25 + 0.6 * rng.next_double()) * (num_freqs - 1);
      n.slope_bins = (rng.next_double() - 0.5) * 0.2 * (num_freqs - 1);
    }
    const std::vector<double> perturb =
        draw_field(rng, basis.n_basis(), kPerturbScaleDb);
    const Envelope perturb_env = Envelope::draw(rng);

    // Left-ear construction at an arbitrary direction basis row.
    const auto spectrum_at = [&](const std::vector<double>& basis_row,
                                 double elevation_deg, double* out) {
      const double g = eval_field(field, basis_row);
      for (int f = 0; f < num_freqs; ++f) {
        const double x = num_freqs > 1 ? static_cast<double>(f) / (num_freqs - 1) : 0.0;
        double v = g * env.at(x);
        for (const Notch& n : notches) {
          const double center = n.center_bin + n.slope_bins * (elevation_deg / 90.0);
          const double z = (f - center) / n.width_bins;
          v -= n.depth_db * std::exp(-0.5 * z * z);
        }
        out[f] = v;
      }
    };

    std::vector<float> payload(static_cast<size_t>(num_dirs) * 2 *
                               static_cast<size_t>(num_freqs));
    std::vector<double> buf(static_cast<size_t>(num_freqs));
    for (int d = 0; d < num_dirs; ++d) {
      const double el = dirs[static_cast<size_t>(d)].elevation_deg();
      const size_t base = static_cast<size_t>(d) * 2 * static_cast<size_t>(num_freqs);

      spectrum_at(rows[static_cast<size_t>(d)], el, buf.data());
      for (int f = 0; f < num_freqs; ++f) {
        payload[base + static_cast<size_t>(f)] =
            static_cast<float>(std::clamp(buf[static_cast<size_t>(f)], -60.0, 20.0));
      }

      spectrum_at(mirrored_rows[static_cast<size_t>(d)], el, buf.data());
      const double p = eval_field(perturb, rows[static_cast<size_t>(d)]);
      for (int f = 0; f < num_freqs; ++f) {
        const double x = num_freqs > 1 ? static_cast<double>(f) / (num_freqs - 1) : 0.0;
        const double v = buf[static_cast<size_t>(f)] + p * perturb_env.at(x);
        payload[base + static_cast<size_t>(num_freqs) + static_cast<size_t>(f)] =
            static_cast<float>(std::clamp(v, -60.0, 20.0));
      }
    }

    char id[32];
    std::snprintf(id, sizeof(id), "synth_%03u", s);
    sets.emplace_back(std::string(id), dirs, grid, kSampleRateHz, std::move(payload));
  }
  return sets;
}

}  // namespace hrtf
