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

#include <array>
#include <cmath>
#include <vector>

namespace hrtf {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / kPi); }

// A sound-source direction on the unit sphere.
//
// Coordinate convention (toolkit-wide): x points to the front
// (az 0, el 0), y to the left (az 90, el 0), z up (el 90). Azimuth
// increases counter-clockwise seen from above and is normalized into
// [0, 360); elevation must lie in [-90, 90].
class Direction {
 public:
  Direction() : azimuth_deg_(0.0), elevation_deg_(0.0) {}
  Direction(double azimuth_deg, double elevation_deg);

  double azimuth_deg() const { return azimuth_deg_; }
  double elevation_deg() const { return elevation_deg_; }

  // Unit vector in the convention above; norm is 1 within 1e-12.
  std::array<double, 3> to_cartesian() const;

  static Direction from_cartesian(const std::array<double, 3>& v);

 private:
  double azimuth_deg_;
  double elevation_deg_;
};

// Great-circle (angular) distance in radians, in [0, pi].
double great_circle_distance(const Direction& a, const Direction& b);

// Deterministic near-uniform covering of the sphere with n points
// (golden-angle spiral). Used by the synthetic dataset generator.
std::vector<Direction> fibonacci_sphere(int n);

// Lebedev quadrature grid: point set plus weights summing to 4*pi.
// Supported sizes: 6, 14, 26, 38, 50 (polynomial exactness 3, 5, 7,
// 9, 11 respectively).
struct LebedevGrid {
  std::vector<Direction> directions;
  std::vector<double> weights;
  int exactness = 0;
};

LebedevGrid lebedev_grid(int n_points);

}  // namespace hrtf
