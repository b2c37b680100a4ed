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

#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <set>
#include <vector>

#include "baselines/barycentric.hpp"
#include "baselines/interpolate.hpp"
#include "baselines/sh_basis.hpp"
#include "core/direction.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

using namespace hrtf;

namespace {

// Dense Gaussian elimination with partial pivoting; the brute-force
// normal-equations oracle for sh_fit.
std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[static_cast<size_t>(r) * n + col]) >
          std::abs(a[static_cast<size_t>(pivot) * n + col])) {
        pivot = r;
      }
    }
    for (int c = 0; c < n; ++c) {
      std::swap(a[static_cast<size_t>(col) * n + c], a[static_cast<size_t>(pivot) * n + c]);
    }
    std::swap(b[static_cast<size_t>(col)], b[static_cast<size_t>(pivot)]);
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[static_cast<size_t>(r) * n + col] / a[static_cast<size_t>(col) * n + col];
      for (int c = col; c < n; ++c) {
        a[static_cast<size_t>(r) * n + c] -= factor * a[static_cast<size_t>(col) * n + c];
      }
      b[static_cast<size_t>(r)] -= factor * b[static_cast<size_t>(col)];
    }
  }
  std::vector<double> x(static_cast<size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<size_t>(r)];
    for (int c = r + 1; c < n; ++c) s -= a[static_cast<size_t>(r) * n + c] * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = s / a[static_cast<size_t>(r) * n + r];
  }
  return x;
}

std::vector<double> random_payload(size_t n, uint64_t seed, double scale = 5.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = rng.next_gaussian() * scale;
  return out;
}

double coeff_norm(const ShCoefficients& c) {
  double s = 0.0;
  for (double v : c.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("basis anchors: constant, dipole, and quadrupole values") {
  const ShBasis basis(2);
  REQUIRE(basis.n_basis() == 9);

  const double y00 = 1.0 / std::sqrt(4.0 * kPi);
  for (const Direction& d : {Direction(0, 0), Direction(123, -45), Direction(300, 80)}) {
    CHECK(basis.row(d)[0] == doctest::Approx(y00).epsilon(1e-14));
  }

  // Degree 1 at (az 0, el 0): n = l(l+1)+m, so (1,-1)->1, (1,0)->2, (1,1)->3.
  const auto row = basis.row(Direction(0, 0));
  const double c1 = std::sqrt(3.0 / (4.0 * kPi));
  CHECK(row[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(row[2] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(row[3] == doctest::Approx(c1).epsilon(1e-12));

  // (az 90, el 0): sin(az) picks out the (1,-1) component.
  const auto row90 = basis.row(Direction(90, 0));
  CHECK(row90[1] == doctest::Approx(c1).epsilon(1e-12));
  CHECK(std::abs(row90[3]) < 1e-12);

  // (2,0) at the north pole: sqrt(5/(16 pi)) * (3 sin^2(el) - 1) = 2*sqrt(5/(16 pi)).
  const auto pole = basis.row(Direction(0, 90));
  CHECK(pole[6] == doctest::Approx(2.0 * std::sqrt(5.0 / (16.0 * kPi))).epsilon(1e-12));
}

TEST_CASE("basis is orthonormal under quadrature of sufficient exactness") {
  struct Config {
    int grid_points;
    int l_max;
  };
  for (const Config cfg : {Config{26, 3}, Config{50, 5}}) {
    const LebedevGrid grid = lebedev_grid(cfg.grid_points);
    REQUIRE(grid.exactness >= 2 * cfg.l_max);
    const ShBasis basis(cfg.l_max);
    const int n = basis.n_basis();
    std::vector<std::vector<double>> rows;
    for (const Direction& d : grid.directions) rows.push_back(basis.row(d));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double g = 0.0;
        for (size_t q = 0; q < rows.size(); ++q) {
          g += grid.weights[q] * rows[q][static_cast<size_t>(i)] * rows[q][static_cast<size_t>(j)];
        }
        CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
        if (i != j) CHECK(std::abs(g) < 1e-8);
      }
    }
  }
}

TEST_CASE("constant field fits to the monopole coefficient alone") {
  const LebedevGrid grid = lebedev_grid(26);
  const double c = 3.7;
  const int num_freqs = 2;
  std::vector<double> measured(grid.directions.size() * 2 * num_freqs, c);
  const ShCoefficients coeffs = sh_fit(grid.directions, measured, num_freqs, 2, 0.0);
  for (int e = 0; e < 2; ++e) {
    for (int f = 0; f < num_freqs; ++f) {
      CHECK(coeffs.at(0, e, f) == doctest::Approx(c * std::sqrt(4.0 * kPi)).epsilon(1e-10));
      for (int n = 1; n < coeffs.n_basis; ++n) {
        CHECK(std::abs(coeffs.at(n, e, f)) < 1e-8);
      }
    }
  }
}

TEST_CASE("band-limited fields are recovered exactly") {
  const LebedevGrid grid = lebedev_grid(26);  // exactness 7 >= 2*2
  const int l_max = 2;
  const ShBasis basis(l_max);
  const int num_freqs = 3;
  const auto truth = random_payload(static_cast<size_t>(basis.n_basis()) * 2 * num_freqs, 51, 1.0);

  std::vector<double> measured(grid.directions.size() * 2 * num_freqs, 0.0);
  for (size_t d = 0; d < grid.directions.size(); ++d) {
    const auto row = basis.row(grid.directions[d]);
    for (int e = 0; e < 2; ++e) {
      for (int f = 0; f < num_freqs; ++f) {
        double v = 0.0;
        for (int n = 0; n < basis.n_basis(); ++n) {
          v += truth[(static_cast<size_t>(n) * 2 + static_cast<size_t>(e)) * num_freqs + static_cast<size_t>(f)] *
               row[static_cast<size_t>(n)];
        }
        measured[(d * 2 + static_cast<size_t>(e)) * num_freqs + static_cast<size_t>(f)] = v;
      }
    }
  }

  const ShCoefficients coeffs = sh_fit(grid.directions, measured, num_freqs, l_max, 0.0);
  for (size_t i = 0; i < truth.size(); ++i) {
    CHECK(coeffs.a[i] == doctest::Approx(truth[i]).epsilon(1e-8));
  }
}

TEST_CASE("huge ridge shrinks all coefficients to zero") {
  const LebedevGrid grid = lebedev_grid(14);
  const int num_freqs = 2;
  const auto measured = random_payload(grid.directions.size() * 2 * num_freqs, 52);
  const ShCoefficients coeffs = sh_fit(grid.directions, measured, num_freqs, 1, 1e12);
  for (double v : coeffs.a) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("ridge shrinkage is monotone in lambda") {
  const auto dirs = fibonacci_sphere(20);
  const int num_freqs = 4;
  const auto measured = random_payload(dirs.size() * 2 * num_freqs, 53);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 1e-3, 1.0, 10.0, 1e3}) {
    const double norm = coeff_norm(sh_fit(dirs, measured, num_freqs, 2, lambda));
    CHECK(norm <= prev + 1e-9);
    prev = norm;
  }
}

TEST_CASE("unregularized underdetermined fit is rejected naming the sizes") {
  const auto dirs = fibonacci_sphere(8);  // 8 < (2+1)^2
  const auto measured = random_payload(dirs.size() * 2 * 2, 54);
  CHECK_THROWS_WITH_AS(sh_fit(dirs, measured, 2, 2, 0.0), doctest::Contains("l_max"),
                       Error);
  CHECK_THROWS_AS(sh_fit(dirs, measured, 2, 2, -1.0), Error);
}

TEST_CASE("fit equals the brute-force normal-equations oracle") {
  const auto dirs = fibonacci_sphere(30);
  const int l_max = 3;
  const ShBasis basis(l_max);
  const int n = basis.n_basis();
  const int num_freqs = 2;
  const auto measured = random_payload(dirs.size() * 2 * num_freqs, 55);

  const ShCoefficients coeffs = sh_fit(dirs, measured, num_freqs, l_max, 0.0);

  std::vector<std::vector<double>> rows;
  for (const Direction& d : dirs) rows.push_back(basis.row(d));
  for (int e = 0; e < 2; ++e) {
    for (int f = 0; f < num_freqs; ++f) {
      std::vector<double> gram(static_cast<size_t>(n) * n, 0.0);
      std::vector<double> rhs(static_cast<size_t>(n), 0.0);
      for (size_t d = 0; d < dirs.size(); ++d) {
        const double h = measured[(d * 2 + static_cast<size_t>(e)) * num_freqs + static_cast<size_t>(f)];
        for (int i = 0; i < n; ++i) {
          rhs[static_cast<size_t>(i)] += rows[d][static_cast<size_t>(i)] * h;
          for (int j = 0; j < n; ++j) {
            gram[static_cast<size_t>(i) * n + static_cast<size_t>(j)] +=
                rows[d][static_cast<size_t>(i)] * rows[d][static_cast<size_t>(j)];
          }
        }
      }
      const auto oracle = gauss_solve(gram, rhs, n);
      for (int i = 0; i < n; ++i) {
        CHECK(coeffs.at(i, e, f) == doctest::Approx(oracle[static_cast<size_t>(i)]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("square unregularized fit interpolates the measurements") {
  const auto dirs = fibonacci_sphere(25);  // matches (4+1)^2 basis functions
  const int num_freqs = 2;
  const auto measured = random_payload(dirs.size() * 2 * num_freqs, 56);
  const ShCoefficients coeffs = sh_fit(dirs, measured, num_freqs, 4, 0.0);
  const auto back = sh_eval(coeffs, dirs);
  for (size_t i = 0; i < measured.size(); ++i) {
    CHECK(back[i] == doctest::Approx(measured[i]).epsilon(1e-6));
  }
}

TEST_CASE("eval of zero or monopole-only coefficients") {
  ShCoefficients coeffs;
  coeffs.l_max = 1;
  coeffs.n_basis = 4;
  coeffs.num_freqs = 1;
  coeffs.a.assign(4 * 2 * 1, 0.0);
  const auto dirs = fibonacci_sphere(10);

  auto out = sh_eval(coeffs, dirs);
  for (double v : out) CHECK(v == 0.0);

  coeffs.a[0] = 2.0;  // left ear monopole
  out = sh_eval(coeffs, dirs);
  const double expect = 2.0 / std::sqrt(4.0 * kPi);
  for (size_t d = 0; d < dirs.size(); ++d) {
    CHECK(out[d * 2] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(out[d * 2 + 1] == 0.0);
  }
}

TEST_CASE("nearest neighbor copies the closest measurement") {
  const int num_freqs = 3;
  const std::vector<Direction> measured_dirs = {Direction(0, 0), Direction(120, 0),
                                                Direction(240, 0)};
  const auto measured = random_payload(measured_dirs.size() * 2 * num_freqs, 61);

  SUBCASE("coincident target copies exactly") {
    const auto out = nearest_neighbor(measured_dirs, measured, num_freqs,
                                      {Direction(120, 0)});
    for (int i = 0; i < 2 * num_freqs; ++i) {
      CHECK(out[static_cast<size_t>(i)] == measured[static_cast<size_t>(2 * num_freqs + i)]);
    }
  }
  SUBCASE("azimuth 100 maps to the 120-degree row") {
    const auto out = nearest_neighbor(measured_dirs, measured, num_freqs,
                                      {Direction(100, 0)});
    for (int i = 0; i < 2 * num_freqs; ++i) {
      CHECK(out[static_cast<size_t>(i)] == measured[static_cast<size_t>(2 * num_freqs + i)]);
    }
  }
  SUBCASE("single measurement feeds every target") {
    const std::vector<Direction> one = {Direction(10, 10)};
    const auto single = random_payload(2 * num_freqs, 62);
    const auto out = nearest_neighbor(one, single, num_freqs,
                                      {Direction(0, 0), Direction(180, -45)});
    for (int t = 0; t < 2; ++t) {
      for (int i = 0; i < 2 * num_freqs; ++i) {
        CHECK(out[static_cast<size_t>(t * 2 * num_freqs + i)] == single[static_cast<size_t>(i)]);
      }
    }
  }
  SUBCASE("exact distance ties resolve to the lowest index") {
    const std::vector<Direction> dup = {Direction(90, 0), Direction(90, 0)};
    const auto two = random_payload(dup.size() * 2 * num_freqs, 63);
    const auto out = nearest_neighbor(dup, two, num_freqs, {Direction(45, 20)});
    for (int i = 0; i < 2 * num_freqs; ++i) {
      CHECK(out[static_cast<size_t>(i)] == two[static_cast<size_t>(i)]);
    }
  }
}

TEST_CASE("distance weighting") {
  const int num_freqs = 2;

  SUBCASE("coincident target is dominated by its measurement") {
    const std::vector<Direction> dirs = {Direction(0, 0), Direction(90, 0)};
    std::vector<double> measured = {1.0, 1.0, 1.0, 1.0, -9.0, -9.0, -9.0, -9.0};
    const auto out = distance_weighted(dirs, measured, num_freqs, {Direction(0, 0)});
    for (int i = 0; i < 2 * num_freqs; ++i) {
      CHECK(std::abs(out[static_cast<size_t>(i)] - 1.0) < 1e-3);
    }
  }
  SUBCASE("identical spectra pass through unchanged") {
    const std::vector<Direction> dirs = {Direction(0, 0), Direction(90, 0),
                                         Direction(200, -30)};
    std::vector<double> measured;
    const std::vector<double> spectrum = {0.5, -1.5, 2.5, 3.5};
    for (int m = 0; m < 3; ++m) {
      measured.insert(measured.end(), spectrum.begin(), spectrum.end());
    }
    const auto out = distance_weighted(dirs, measured, num_freqs,
                                       {Direction(33, 12), Direction(310, 70)});
    for (size_t t = 0; t < 2; ++t) {
      for (size_t i = 0; i < spectrum.size(); ++i) {
        CHECK(out[t * spectrum.size() + i] == doctest::Approx(spectrum[i]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("two equidistant measurements average") {
    const std::vector<Direction> dirs = {Direction(90, 0), Direction(270, 0)};
    const auto measured = random_payload(dirs.size() * 2 * num_freqs, 64);
    const auto out = distance_weighted(dirs, measured, num_freqs, {Direction(0, 0)});
    for (int i = 0; i < 2 * num_freqs; ++i) {
      const double mean = 0.5 * (measured[static_cast<size_t>(i)] +
                                 measured[static_cast<size_t>(2 * num_freqs + i)]);
      CHECK(out[static_cast<size_t>(i)] == doctest::Approx(mean).epsilon(1e-9));
    }
  }
  SUBCASE("all-zero weights raise an error") {
    const std::vector<Direction> dirs = {Direction(0, 0)};
    const auto measured = random_payload(2 * num_freqs, 65);
    const SpatialKernel zero = [](const Direction&, const Direction&) { return 0.0; };
    CHECK_THROWS_AS(distance_weighted(dirs, measured, num_freqs, {Direction(5, 5)}, zero),
                    Error);
  }
  SUBCASE("negative kernel weight is invalid") {
    const std::vector<Direction> dirs = {Direction(0, 0)};
    const auto measured = random_payload(2 * num_freqs, 66);
    const SpatialKernel bad = [](const Direction&, const Direction&) { return -1.0; };
    CHECK_THROWS_AS(distance_weighted(dirs, measured, num_freqs, {Direction(5, 5)}, bad),
                    Error);
  }
}

TEST_CASE("interpolants stay within the measured range per (ear, frequency)") {
  const int num_freqs = 4;
  const auto measured_dirs = fibonacci_sphere(16);
  const auto measured = random_payload(measured_dirs.size() * 2 * num_freqs, 67);
  const auto targets = std::vector<Direction>{Direction(10, 5), Direction(200, -40),
                                              Direction(77, 62), Direction(300, 10)};

  const auto dw = distance_weighted(measured_dirs, measured, num_freqs, targets);
  const auto bary = barycentric(measured_dirs, measured, num_freqs, targets);

  for (size_t t = 0; t < targets.size(); ++t) {
    for (int e = 0; e < 2; ++e) {
      for (int f = 0; f < num_freqs; ++f) {
        double lo = 1e30, hi = -1e30;
        for (size_t m = 0; m < measured_dirs.size(); ++m) {
          const double v = measured[(m * 2 + static_cast<size_t>(e)) * num_freqs + static_cast<size_t>(f)];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        const size_t idx = (t * 2 + static_cast<size_t>(e)) * num_freqs + static_cast<size_t>(f);
        CHECK(dw[idx] >= lo - 1e-9);
        CHECK(dw[idx] <= hi + 1e-9);
        CHECK(bary.values[idx] >= lo - 1e-9);
        CHECK(bary.values[idx] <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("sphere triangulation builds a closed outward hull") {
  SUBCASE("octahedron") {
    const LebedevGrid grid = lebedev_grid(6);
    const auto tris = sphere_triangulation(grid.directions);
    CHECK(tris.size() == 8);
  }
  SUBCASE("spiral covering satisfies Euler's formula and keeps every vertex") {
    const auto dirs = fibonacci_sphere(32);
    const auto tris = sphere_triangulation(dirs);
    CHECK(tris.size() == 2u * 32 - 4);

    std::set<int> used;
    std::set<std::pair<int, int>> edges;
    for (const auto& t : tris) {
      for (int k = 0; k < 3; ++k) {
        used.insert(t[static_cast<size_t>(k)]);
        const int a = t[static_cast<size_t>(k)];
        const int b = t[static_cast<size_t>((k + 1) % 3)];
        edges.insert({std::min(a, b), std::max(a, b)});
      }
    }
    CHECK(used.size() == 32);
    // V - E + F = 2
    CHECK(32 - static_cast<int>(edges.size()) + static_cast<int>(tris.size()) == 2);

    // Outward orientation: face normal points away from the origin.
    for (const auto& t : tris) {
      const auto a = dirs[static_cast<size_t>(t[0])].to_cartesian();
      const auto b = dirs[static_cast<size_t>(t[1])].to_cartesian();
      const auto c = dirs[static_cast<size_t>(t[2])].to_cartesian();
      const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
      const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
      const double nx = uy * vz - uz * vy;
      const double ny = uz * vx - ux * vz;
      const double nz = ux * vy - uy * vx;
      CHECK(nx * a[0] + ny * a[1] + nz * a[2] > 0.0);
    }
  }
  SUBCASE("degenerate inputs throw") {
    CHECK_THROWS_AS(sphere_triangulation({Direction(0, 0), Direction(90, 0)}), Error);
    // All on the equator: one great circle.
    std::vector<Direction> ring;
    for (int i = 0; i < 8; ++i) ring.emplace_back(45.0 * i, 0.0);
    CHECK_THROWS_AS(sphere_triangulation(ring), Error);
  }
}

TEST_CASE("triangle weights") {
  SUBCASE("vertex target gets weight one") {
    const std::array<std::array<double, 3>, 3> verts = {
        Direction(0, 10).to_cartesian(), Direction(120, 10).to_cartesian(),
        Direction(240, 10).to_cartesian()};
    const TriangleWeights tw = spherical_triangle_weights(verts, verts[0]);
    CHECK(tw.inside);
    CHECK(tw.w[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(tw.w[1]) < 1e-12);
    CHECK(std::abs(tw.w[2]) < 1e-12);
  }
  SUBCASE("centroid of an equilateral triangle splits evenly") {
    const std::array<std::array<double, 3>, 3> verts = {
        Direction(0, 30).to_cartesian(), Direction(120, 30).to_cartesian(),
        Direction(240, 30).to_cartesian()};
    const TriangleWeights tw =
        spherical_triangle_weights(verts, Direction(0, 90).to_cartesian());
    CHECK(tw.inside);
    for (double w : tw.w) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("weights sum to one within 1e-12") {
    Rng rng(68);
    const std::array<std::array<double, 3>, 3> verts = {
        Direction(10, 5).to_cartesian(), Direction(80, 20).to_cartesian(),
        Direction(40, 70).to_cartesian()};
    for (int i = 0; i < 50; ++i) {
      const Direction t(rng.next_double() * 70 + 10, rng.next_double() * 60 + 5);
      const TriangleWeights tw = spherical_triangle_weights(verts, t.to_cartesian());
      CHECK(std::abs(tw.w[0] + tw.w[1] + tw.w[2] - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("barycentric interpolation") {
  const int num_freqs = 3;

  SUBCASE("vertex targets copy their measurement exactly") {
    const auto dirs = fibonacci_sphere(12);
    const auto measured = random_payload(dirs.size() * 2 * num_freqs, 71);
    const auto out = barycentric(dirs, measured, num_freqs, {dirs[5]});
    CHECK_FALSE(out.distance_weighted_fallback);
    for (int i = 0; i < 2 * num_freqs; ++i) {
      CHECK(out.values[static_cast<size_t>(i)] ==
            measured[static_cast<size_t>(5 * 2 * num_freqs + i)]);
    }
  }

  SUBCASE("equilateral centroid blends evenly") {
    const std::vector<Direction> dirs = {Direction(0, 30), Direction(120, 30),
                                         Direction(240, 30)};
    const auto measured = random_payload(dirs.size() * 2 * num_freqs, 72);
    const auto out = barycentric(dirs, measured, num_freqs, {Direction(0, 90)});
    CHECK_FALSE(out.distance_weighted_fallback);
    CHECK(out.extrapolated_targets == 0);
    for (int i = 0; i < 2 * num_freqs; ++i) {
      const double mean = (measured[static_cast<size_t>(i)] +
                           measured[static_cast<size_t>(2 * num_freqs + i)] +
                           measured[static_cast<size_t>(4 * num_freqs + i)]) /
                          3.0;
      CHECK(out.values[static_cast<size_t>(i)] == doctest::Approx(mean).epsilon(1e-9));
    }
  }

  SUBCASE("linear Cartesian fields match gnomonic linear interpolation") {
    const std::vector<Direction> dirs = {Direction(20, 10), Direction(100, 25),
                                         Direction(60, 70)};
    const Direction target(55, 35);

    // Two affine fields in Cartesian coordinates, one per ear.
    const auto field = [](const std::array<double, 3>& v, int e) {
      return e == 0 ? 2.0 * v[0] - 1.5 * v[1] + 0.5 * v[2] + 3.0
                    : -1.0 * v[0] + 0.25 * v[1] + 2.0 * v[2] - 1.0;
    };
    std::vector<double> measured;
    for (const Direction& d : dirs) {
      for (int e = 0; e < 2; ++e) {
        const double v = field(d.to_cartesian(), e);
        for (int f = 0; f < num_freqs; ++f) measured.push_back(v);
      }
    }
    const auto out = barycentric(dirs, measured, num_freqs, {target});
    REQUIRE_FALSE(out.distance_weighted_fallback);

    // Gnomonic projection of the target onto the triangle plane, where
    // the affine interpolant of an affine field is the field itself.
    const auto a = dirs[0].to_cartesian();
    const auto b = dirs[1].to_cartesian();
    const auto c = dirs[2].to_cartesian();
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    const std::array<double, 3> n = {uy * vz - uz * vy, uz * vx - ux * vz,
                                     ux * vy - uy * vx};
    const double offset = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
    const auto t = target.to_cartesian();
    const double scale = offset / (n[0] * t[0] + n[1] * t[1] + n[2] * t[2]);
    const std::array<double, 3> projected = {t[0] * scale, t[1] * scale, t[2] * scale};

    for (int e = 0; e < 2; ++e) {
      const double expect = field(projected, e);
      for (int f = 0; f < num_freqs; ++f) {
        CHECK(out.values[static_cast<size_t>(e * num_freqs + f)] ==
              doctest::Approx(expect).epsilon(1e-9));
      }
    }
  }

  SUBCASE("exterior targets are flagged and stay convex") {
    const std::vector<Direction> dirs = {Direction(0, 60), Direction(120, 60),
                                         Direction(240, 60)};
    const auto measured = random_payload(dirs.size() * 2 * num_freqs, 73);
    const auto out = barycentric(dirs, measured, num_freqs,
                                 {Direction(0, -90), Direction(180, -20)});
    CHECK_FALSE(out.distance_weighted_fallback);
    CHECK(out.extrapolated_targets == 2);
    for (size_t i = 0; i < out.values.size(); ++i) {
      const size_t ef = i % (2 * num_freqs);
      double lo = 1e30, hi = -1e30;
      for (size_t m = 0; m < 3; ++m) {
        lo = std::min(lo, measured[m * 2 * num_freqs + ef]);
        hi = std::max(hi, measured[m * 2 * num_freqs + ef]);
      }
      CHECK(out.values[i] >= lo - 1e-9);
      CHECK(out.values[i] <= hi + 1e-9);
    }
  }

  SUBCASE("great-circle geometry falls back to distance weighting") {
    std::vector<Direction> ring;
    for (int i = 0; i < 6; ++i) ring.emplace_back(60.0 * i, 0.0);
    const auto measured = random_payload(ring.size() * 2 * num_freqs, 74);
    const std::vector<Direction> targets = {Direction(30, 10), Direction(200, -50)};
    const auto out = barycentric(ring, measured, num_freqs, targets);
    CHECK(out.distance_weighted_fallback);
    const auto dw = distance_weighted(ring, measured, num_freqs, targets);
    CHECK(out.values == dw);
  }

  SUBCASE("interior targets lie in exactly one strict triangle") {
    const auto dirs = fibonacci_sphere(24);
    const auto tris = sphere_triangulation(dirs);
    Rng rng(75);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
      const Direction t(rng.next_double() * 360.0, (rng.next_double() - 0.5) * 180.0);
      int strict = 0;
      for (const auto& tri : tris) {
        const std::array<std::array<double, 3>, 3> verts = {
            dirs[static_cast<size_t>(tri[0])].to_cartesian(),
            dirs[static_cast<size_t>(tri[1])].to_cartesian(),
            dirs[static_cast<size_t>(tri[2])].to_cartesian()};
        const TriangleWeights tw = spherical_triangle_weights(verts, t.to_cartesian());
        if (tw.inside && std::min({tw.w[0], tw.w[1], tw.w[2]}) > 1e-9) ++strict;
      }
      if (strict > 0) {
        CHECK(strict == 1);
        ++checked;
      }
    }
    CHECK(checked > 30);  // nearly all random targets are strictly interior
  }
}
