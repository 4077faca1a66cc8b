/*
Copyright 2026 The gpf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Independent reference computations used by the tests. Nothing here calls
// into the library beyond plain data types.

#ifndef GPF_TESTS_ORACLES_HPP_
#define GPF_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gpf/geometry.hpp"

namespace testing_oracles {

using gpf::Point;

// Convex hull, counterclockwise, collinear points dropped (up to a relative
// 1e-12 turn), starting at the lowest (then leftmost) vertex.
inline std::vector<Point> Hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](Point o, Point a, Point b) {
    const double c = (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    const double scale = std::hypot(a.x - o.x, a.y - o.y) * std::hypot(b.x - o.x, b.y - o.y);
    return std::abs(c) <= 1e-12 * scale ? 0.0 : c;
  };
  std::vector<Point> h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  size_t start = 0;
  for (size_t i = 1; i < h.size(); ++i) {
    if (h[i].y < h[start].y || (h[i].y == h[start].y && h[i].x < h[start].x)) start = i;
  }
  std::rotate(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(start), h.end());
  return h;
}

inline double Gauss(double x, double y) {
  return std::exp(-(x * x + y * y) / 2) / (2 * std::numbers::pi);
}

// Dense grid of nodal values, zero outside the interior mask.
struct Sampled {
  double x0 = 0.0, y0 = 0.0, h = 0.0;
  int nx = 0, ny = 0;
  std::vector<unsigned char> mask;
  std::vector<double> u;

  double at(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return 0.0;
    return u[static_cast<size_t>(j) * nx + i];
  }
};

// Cell-centered energy: each cell contributes w(center) h^2 / 4 times the
// sum over its four corners of |g|^p, where the corner gradient uses the
// cell's two edges meeting at that corner.
inline double CellEnergy(const Sampled& s, double p, double delta = 0.0) {
  double e = 0.0;
  for (int j = -1; j < s.ny; ++j) {
    for (int i = -1; i < s.nx; ++i) {
      const double a = s.at(i, j), b = s.at(i + 1, j);
      const double c = s.at(i, j + 1), d = s.at(i + 1, j + 1);
      if (a == 0 && b == 0 && c == 0 && d == 0) continue;
      const double gx_lo = (b - a) / s.h, gx_hi = (d - c) / s.h;
      const double gy_l = (c - a) / s.h, gy_r = (d - b) / s.h;
      const double corners[4][2] = {
          {gx_lo, gy_l}, {gx_lo, gy_r}, {gx_hi, gy_l}, {gx_hi, gy_r}};
      double sum = 0.0;
      for (const auto& g : corners) {
        sum += std::pow(g[0] * g[0] + g[1] * g[1] + delta, p / 2);
      }
      const double cx = s.x0 + (i + 0.5) * s.h, cy = s.y0 + (j + 0.5) * s.h;
      e += Gauss(cx, cy) * s.h * s.h / 4 * sum;
    }
  }
  return e;
}

// Lumped mass: sum over nodes of h^2 w(x) |u|^p.
inline double LumpedMass(const Sampled& s, double p) {
  double m = 0.0;
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      m += s.h * s.h * Gauss(s.x0 + i * s.h, s.y0 + j * s.h) * std::pow(std::abs(s.at(i, j)), p);
    }
  }
  return m;
}

}  // namespace testing_oracles

#endif  // GPF_TESTS_ORACLES_HPP_
