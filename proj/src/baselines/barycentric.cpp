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

#include "baselines/barycentric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "baselines/interpolate.hpp"
#include "core/error.hpp"

namespace hrtf {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
Vec3 sub3(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
double norm3(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct Face {
  int a, b, c;   // vertex indices, CCW seen from outside
  Vec3 n;        // unit outward normal
  double offset; // n . x = offset on the face plane
};

constexpr double kVisibleEps = 1e-10;

Face make_face(int i, int j, int k, const std::vector<Vec3>& pts,
               const Vec3& interior) {
  Vec3 n = cross(sub3(pts[static_cast<size_t>(j)], pts[static_cast<size_t>(i)]),
                 sub3(pts[static_cast<size_t>(k)], pts[static_cast<size_t>(i)]));
  const double len = norm3(n);
  if (len < 1e-14) throw_numeric("barycentric: degenerate hull face");
  for (double& v : n) v /= len;
  double offset = dot(n, pts[static_cast<size_t>(i)]);
  if (dot(n, interior) > offset) {
    std::swap(j, k);
    for (double& v : n) v = -v;
    offset = -offset;
  }
  return Face{i, j, k, n, offset};
}

// Incremental convex hull of points on (or near) the unit sphere. The
// point count here is the measurement count M, so the quadratic edge-map
// rebuild per insertion is irrelevant.
std::vector<Face> convex_hull(const std::vector<Vec3>& pts) {
  const int n = static_cast<int>(pts.size());

  // Initial tetrahedron: spread-out quadruple.
  int p0 = 0, p1 = -1, p2 = -1, p3 = -1;
  double best = -1.0;
  for (int i = 1; i < n; ++i) {
    const double d = norm3(sub3(pts[static_cast<size_t>(i)], pts[0]));
    if (d > best) {
      best = d;
      p1 = i;
    }
  }
  if (best < 1e-9) throw_numeric("barycentric: all points coincide");
  const Vec3 axis = sub3(pts[static_cast<size_t>(p1)], pts[0]);
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = norm3(cross(axis, sub3(pts[static_cast<size_t>(i)], pts[0])));
    if (d > best) {
      best = d;
      p2 = i;
    }
  }
  if (best < 1e-9) throw_numeric("barycentric: points are collinear");
  Vec3 plane_n = cross(axis, sub3(pts[static_cast<size_t>(p2)], pts[0]));
  const double plane_len = norm3(plane_n);
  for (double& v : plane_n) v /= plane_len;
  const double plane_off = dot(plane_n, pts[0]);
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(dot(plane_n, pts[static_cast<size_t>(i)]) - plane_off);
    if (d > best) {
      best = d;
      p3 = i;
    }
  }
  if (best < 1e-9) {
    throw_numeric("barycentric: points are coplanar, no spherical triangulation");
  }

  Vec3 interior = {0, 0, 0};
  for (int idx : {p0, p1, p2, p3}) {
    for (int k = 0; k < 3; ++k) interior[static_cast<size_t>(k)] += pts[static_cast<size_t>(idx)][static_cast<size_t>(k)] / 4.0;
  }

  std::vector<Face> faces;
  faces.push_back(make_face(p0, p1, p2, pts, interior));
  faces.push_back(make_face(p0, p1, p3, pts, interior));
  faces.push_back(make_face(p0, p2, p3, pts, interior));
  faces.push_back(make_face(p1, p2, p3, pts, interior));

  for (int i = 0; i < n; ++i) {
    if (i == p0 || i == p1 || i == p2 || i == p3) continue;
    const Vec3& p = pts[static_cast<size_t>(i)];
    std::vector<char> visible(faces.size(), 0);
    bool any = false;
    for (size_t f = 0; f < faces.size(); ++f) {
      if (dot(faces[f].n, p) - faces[f].offset > kVisibleEps) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;  // on or inside the current hull

    // Horizon = directed edges of visible faces whose twin face survives.
    std::map<std::pair<int, int>, size_t> edge_owner;
    for (size_t f = 0; f < faces.size(); ++f) {
      const Face& fc = faces[f];
      edge_owner[{fc.a, fc.b}] = f;
      edge_owner[{fc.b, fc.c}] = f;
      edge_owner[{fc.c, fc.a}] = f;
    }
    std::vector<std::pair<int, int>> horizon;
    for (size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const Face& fc = faces[f];
      for (const auto& e : {std::pair<int, int>{fc.a, fc.b},
                            std::pair<int, int>{fc.b, fc.c},
                            std::pair<int, int>{fc.c, fc.a}}) {
        const auto twin = edge_owner.find({e.second, e.first});
        if (twin == edge_owner.end() || !visible[twin->second]) {
          horizon.push_back(e);
        }
      }
    }

    std::vector<Face> kept;
    kept.reserve(faces.size());
    for (size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) kept.push_back(faces[f]);
    }
    for (const auto& e : horizon) {
      kept.push_back(make_face(e.first, e.second, i, pts, interior));
    }
    faces = std::move(kept);
  }
  return faces;
}

Vec3 unit_vec(const Direction& d) {
  const auto v = d.to_cartesian();
  return {v[0], v[1], v[2]};
}

}  // namespace

TriangleWeights spherical_triangle_weights(const std::array<Vec3, 3>& verts,
                                           const Vec3& target) {
  const Vec3& v0 = verts[0];
  const Vec3& v1 = verts[1];
  const Vec3& v2 = verts[2];
  const double det = dot(v0, cross(v1, v2));
  TriangleWeights tw{{0, 0, 0}, false};
  if (std::abs(det) < 1e-14) return tw;  // plane through the origin
  const double u0 = dot(target, cross(v1, v2)) / det;
  const double u1 = dot(v0, cross(target, v2)) / det;
  const double u2 = dot(v0, cross(v1, target)) / det;
  const double s = u0 + u1 + u2;
  if (std::abs(s) < 1e-12) return tw;
  tw.w = {u0 / s, u1 / s, u2 / s};
  tw.inside = s > 0.0 && std::min({tw.w[0], tw.w[1], tw.w[2]}) >= -1e-9;
  return tw;
}

std::vector<std::array<int, 3>> sphere_triangulation(
    const std::vector<Direction>& dirs) {
  if (dirs.size() < 3) throw_numeric("barycentric: need at least 3 directions");
  std::vector<Vec3> pts;
  pts.reserve(dirs.size());
  for (const Direction& d : dirs) pts.push_back(unit_vec(d));

  if (dirs.size() == 3) {
    const double det = dot(pts[0], cross(pts[1], pts[2]));
    if (std::abs(det) < 1e-12) {
      throw_numeric("barycentric: three directions on one great circle");
    }
    return {{0, 1, 2}};
  }
  const std::vector<Face> faces = convex_hull(pts);
  std::vector<std::array<int, 3>> out;
  out.reserve(faces.size());
  for (const Face& f : faces) out.push_back({f.a, f.b, f.c});
  return out;
}

BarycentricResult barycentric(const std::vector<Direction>& measured_dirs,
                              const std::vector<double>& measured,
                              int num_freqs,
                              const std::vector<Direction>& targets) {
  const size_t row = 2 * static_cast<size_t>(num_freqs);
  if (measured.size() != measured_dirs.size() * row) {
    throw_invalid("barycentric: measured size does not match M*2*F");
  }

  BarycentricResult result;
  std::vector<std::array<int, 3>> tris;
  try {
    tris = sphere_triangulation(measured_dirs);
  } catch (const Error&) {
    result.values = distance_weighted(measured_dirs, measured, num_freqs, targets);
    result.distance_weighted_fallback = true;
    return result;
  }

  std::vector<Vec3> pts;
  pts.reserve(measured_dirs.size());
  for (const Direction& d : measured_dirs) pts.push_back(unit_vec(d));

  result.values.assign(targets.size() * row, 0.0);
  for (size_t t = 0; t < targets.size(); ++t) {
    double* dst = result.values.data() + t * row;

    // Coincident targets copy the measurement bit-for-bit.
    int coincident = -1;
    for (size_t m = 0; m < measured_dirs.size(); ++m) {
      if (great_circle_distance(targets[t], measured_dirs[m]) < 1e-12) {
        coincident = static_cast<int>(m);
        break;
      }
    }
    if (coincident >= 0) {
      const double* src = measured.data() + static_cast<size_t>(coincident) * row;
      std::copy(src, src + row, dst);
      continue;
    }

    const Vec3 tv = unit_vec(targets[t]);
    double best_score = -1e30;
    std::array<int, 3> best_tri = tris[0];
    std::array<double, 3> best_w = {1, 0, 0};
    for (const auto& tri : tris) {
      const std::array<Vec3, 3> verts = {pts[static_cast<size_t>(tri[0])],
                                         pts[static_cast<size_t>(tri[1])],
                                         pts[static_cast<size_t>(tri[2])]};
      const Vec3& v0 = verts[0];
      const Vec3& v1 = verts[1];
      const Vec3& v2 = verts[2];
      const double det = dot(v0, cross(v1, v2));
      if (std::abs(det) < 1e-14) continue;
      const double u0 = dot(tv, cross(v1, v2)) / det;
      const double u1 = dot(v0, cross(tv, v2)) / det;
      const double u2 = dot(v0, cross(v1, tv)) / det;
      const double s = u0 + u1 + u2;
      if (std::abs(s) < 1e-12) continue;
      const std::array<double, 3> w = {u0 / s, u1 / s, u2 / s};
      double score = std::min({w[0], w[1], w[2]});
      // Faces on the target's side of the sphere always win over faces
      // whose supporting plane is crossed in the opposite sense.
      if (s <= 0.0) score -= 10.0;
      if (score > best_score) {
        best_score = score;
        best_tri = tri;
        best_w = w;
      }
    }

    const bool inside = best_score >= -1e-9;
    if (!inside) ++result.extrapolated_targets;
    double wsum = 0.0;
    for (double& w : best_w) {
      w = std::clamp(w, 0.0, 1.0);
      wsum += w;
    }
    if (!(wsum > 0.0)) {
      // All weights clamped away; fall back to the nearest vertex.
      best_w = {1, 0, 0};
      wsum = 1.0;
    }
    for (int k = 0; k < 3; ++k) {
      const double wk = best_w[static_cast<size_t>(k)] / wsum;
      if (wk == 0.0) continue;
      const double* src =
          measured.data() + static_cast<size_t>(best_tri[static_cast<size_t>(k)]) * row;
      for (size_t j = 0; j < row; ++j) dst[j] += wk * src[j];
    }
  }
  return result;
}

}  // namespace hrtf
