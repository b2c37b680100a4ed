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

#include "core/direction.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace hrtf {

Direction::Direction(double azimuth_deg, double elevation_deg) {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg)) {
    throw_invalid("Direction: non-finite angles");
  }
  if (elevation_deg < -90.0 - 1e-9 || elevation_deg > 90.0 + 1e-9) {
    throw_invalid("Direction: elevation " + std::to_string(elevation_deg) +
                  " outside [-90, 90]");
  }
  double az = std::fmod(azimuth_deg, 360.0);
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az = 0.0;  // fmod can land exactly on 360 after the add
  azimuth_deg_ = az;
  elevation_deg_ = std::clamp(elevation_deg, -90.0, 90.0);
}

std::array<double, 3> Direction::to_cartesian() const {
  const double az = deg2rad(azimuth_deg_);
  const double el = deg2rad(elevation_deg_);
  const double c = std::cos(el);
  return {c * std::cos(az), c * std::sin(az), std::sin(el)};
}

Direction Direction::from_cartesian(const std::array<double, 3>& v) {
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw_invalid("Direction::from_cartesian: zero or non-finite vector");
  }
  const double z = std::clamp(v[2] / norm, -1.0, 1.0);
  const double el = rad2deg(std::asin(z));
  double az = rad2deg(std::atan2(v[1], v[0]));
  if (az < 0.0) az += 360.0;
  return Direction(az, el);
}

double great_circle_distance(const Direction& a, const Direction& b) {
  const auto u = a.to_cartesian();
  const auto v = b.to_cartesian();
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  const std::array<double, 3> cr = {u[1] * v[2] - u[2] * v[1],
                                    u[2] * v[0] - u[0] * v[2],
                                    u[0] * v[1] - u[1] * v[0]};
  const double cross = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
  // atan2 form stays accurate for nearly parallel and nearly antipodal pairs.
  return std::atan2(cross, dot);
}

std::vector<Direction> fibonacci_sphere(int n) {
  if (n < 1) throw_invalid("fibonacci_sphere: n must be >= 1");
  std::vector<Direction> out;
  out.reserve(static_cast<size_t>(n));
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    out.push_back(Direction::from_cartesian(
        {r * std::cos(phi), r * std::sin(phi), z}));
  }
  return out;
}

namespace {

void push_point(LebedevGrid& g, double x, double y, double z, double w4pi) {
  g.directions.push_back(Direction::from_cartesian({x, y, z}));
  g.weights.push_back(w4pi);
}

// Octahedral orbit a1: the 6 axis points.
void orbit_a1(LebedevGrid& g, double w) {
  push_point(g, 1, 0, 0, w);
  push_point(g, -1, 0, 0, w);
  push_point(g, 0, 1, 0, w);
  push_point(g, 0, -1, 0, w);
  push_point(g, 0, 0, 1, w);
  push_point(g, 0, 0, -1, w);
}

// Orbit a2: the 12 edge midpoints (+-1/sqrt2, +-1/sqrt2, 0) and permutations.
void orbit_a2(LebedevGrid& g, double w) {
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    for (int si = -1; si <= 1; si += 2) {
      for (int sj = -1; sj <= 1; sj += 2) {
        double p[3] = {0, 0, 0};
        p[i] = si * s;
        p[j] = sj * s;
        push_point(g, p[0], p[1], p[2], w);
      }
    }
  }
}

// Orbit a3: the 8 cube diagonals (+-1, +-1, +-1)/sqrt3.
void orbit_a3(LebedevGrid& g, double w) {
  const double s = 1.0 / std::sqrt(3.0);
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2)
      for (int sz = -1; sz <= 1; sz += 2)
        push_point(g, sx * s, sy * s, sz * s, w);
}

// Orbit pq0: 24 signed permutations of (p, q, 0), p^2 + q^2 = 1.
void orbit_pq0(LebedevGrid& g, double p, double w) {
  const double q = std::sqrt(1.0 - p * p);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    for (int sp = -1; sp <= 1; sp += 2) {
      for (int sq = -1; sq <= 1; sq += 2) {
        double a[3] = {0, 0, 0};
        a[i] = sp * p;
        a[j] = sq * q;
        push_point(g, a[0], a[1], a[2], w);
        a[i] = sp * q;
        a[j] = sq * p;
        push_point(g, a[0], a[1], a[2], w);
      }
    }
  }
}

// Orbit llm: 24 signed permutations of (l, l, m), 2 l^2 + m^2 = 1.
void orbit_llm(LebedevGrid& g, double l, double w) {
  const double m = std::sqrt(std::max(0.0, 1.0 - 2.0 * l * l));
  for (int i = 0; i < 3; ++i) {  // index carrying m
    for (int sm = -1; sm <= 1; sm += 2) {
      for (int s1 = -1; s1 <= 1; s1 += 2) {
        for (int s2 = -1; s2 <= 1; s2 += 2) {
          double a[3];
          a[i] = sm * m;
          a[(i + 1) % 3] = s1 * l;
          a[(i + 2) % 3] = s2 * l;
          push_point(g, a[0], a[1], a[2], w);
        }
      }
    }
  }
}

}  // namespace

LebedevGrid lebedev_grid(int n_points) {
  LebedevGrid g;
  const double fourpi = 4.0 * kPi;
  switch (n_points) {
    case 6:
      orbit_a1(g, fourpi / 6.0);
      g.exactness = 3;
      break;
    case 14:
      orbit_a1(g, fourpi * (1.0 / 15.0));
      orbit_a3(g, fourpi * (3.0 / 40.0));
      g.exactness = 5;
      break;
    case 26:
      orbit_a1(g, fourpi * (1.0 / 21.0));
      orbit_a2(g, fourpi * (4.0 / 105.0));
      orbit_a3(g, fourpi * (9.0 / 280.0));
      g.exactness = 7;
      break;
    case 38:
      orbit_a1(g, fourpi * (1.0 / 105.0));
      orbit_a3(g, fourpi * (9.0 / 280.0));
      orbit_pq0(g, 0.4597008433809831, fourpi * (1.0 / 35.0));
      g.exactness = 9;
      break;
    case 50:
      orbit_a1(g, fourpi * (4.0 / 315.0));
      orbit_a2(g, fourpi * (64.0 / 2835.0));
      orbit_a3(g, fourpi * (27.0 / 1280.0));
      orbit_llm(g, 0.3015113445777636, fourpi * (14641.0 / 725760.0));
      g.exactness = 11;
      break;
    default:
      throw_invalid("lebedev_grid: unsupported size " +
                    std::to_string(n_points) + " (have 6, 14, 26, 38, 50)");
  }
  return g;
}

}  // namespace hrtf
