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

#include "gpf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "gpf/error.hpp"

namespace gpf {

double Norm(Point a) { return std::hypot(a.x, a.y); }

Direction Direction::FromAngle(double theta) {
  return Direction(std::cos(theta), std::sin(theta));
}

Direction Direction::Normalized(double x, double y) {
  const double n = std::hypot(x, y);
  Require(n > 1e-300 && std::isfinite(n), "direction must be a nonzero vector");
  return Direction(x / n, y / n);
}

ConvexBody ConvexBody::FromVertices(std::vector<Point> v) {
  const std::size_t n = v.size();
  if (n < 3) {
    Fail(ErrorCode::kDegenerate,
         "convex body needs at least 3 vertices, got " + std::to_string(n));
  }
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    const Point c = v[(i + 2) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
      Fail(ErrorCode::kDegenerate, "vertex coordinates must be finite");
    }
    if (a == b) {
      Fail(ErrorCode::kDegenerate,
           "consecutive vertices coincide at index " + std::to_string(i));
    }
    const Point e0 = b - a;
    const Point e1 = c - b;
    const double cr = Cross(e0, e1);
    if (!(cr > 0.0)) {
      Fail(ErrorCode::kDegenerate,
           "vertices are not strictly convex counterclockwise at index " +
               std::to_string((i + 1) % n));
    }
    turning += std::atan2(cr, Dot(e0, e1));
  }
  // A star polygon has every turn positive but winds more than once.
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
    Fail(ErrorCode::kDegenerate, "vertex sequence winds more than once");
  }
  return ConvexBody(std::move(v));
}

Box ConvexBody::BoundingBox() const {
  Box b{vertices_[0], vertices_[0]};
  for (const Point& p : vertices_) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

namespace {

// max and min of <v, y> over the vertices.
std::pair<double, double> Extent(const ConvexBody& body, Direction y) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const Point& v : body.vertices()) {
    const double s = v.x * y.x() + v.y * y.y();
    hi = std::max(hi, s);
    lo = std::min(lo, s);
  }
  return {hi, lo};
}

}  // namespace

double SupportFunction(const ConvexBody& body, Direction y) {
  return Extent(body, y).first;
}

// h(y) + h(-y) = max<v,y> - min<v,y>. Negating y negates every product
// exactly, so Width(K, y) == Width(K, -y) bit for bit.
double Width(const ConvexBody& body, Direction y) {
  const auto [hi, lo] = Extent(body, y);
  return hi + (-lo);
}

double MeanWidth(const ConvexBody& body, int quadrature_points) {
  Require(quadrature_points >= 4, "mean width needs at least 4 directions");
  double sum = 0.0;
  const double step = 2.0 * std::numbers::pi / quadrature_points;
  for (int k = 0; k < quadrature_points; ++k) {
    sum += Width(body, Direction::FromAngle(step * k));
  }
  return sum / quadrature_points;
}

double Perimeter(const ConvexBody& body) {
  const auto v = body.vertices();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += Norm(v[(i + 1) % v.size()] - v[i]);
  }
  return s;
}

double Area(const ConvexBody& body) {
  const auto v = body.vertices();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += Cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * s;
}

namespace {

// Rotation of the vertex list starting at the lowest (then leftmost) vertex,
// so edge angles increase monotonically from [0, 2pi).
std::vector<Point> ScaledFromBottom(const ConvexBody& body, double s) {
  const auto v = body.vertices();
  std::size_t start = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].y < v[start].y || (v[i].y == v[start].y && v[i].x < v[start].x)) {
      start = i;
    }
  }
  std::vector<Point> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(s * v[(start + k) % v.size()]);
  }
  return out;
}

// Drops repeated vertices and vertices whose two edges turn by less than
// kCollinearAngle (in either sense).
std::vector<Point> MergeCollinear(std::vector<Point> v) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Point prev = v[(i + n - 1) % n];
      const Point cur = v[i];
      const Point next = v[(i + 1) % n];
      const Point e0 = cur - prev;
      const Point e1 = next - cur;
      const bool repeated = (e0.x == 0.0 && e0.y == 0.0);
      const bool collinear =
          !repeated && Dot(e0, e1) > 0.0 &&
          std::abs(std::atan2(Cross(e0, e1), Dot(e0, e1))) <= kCollinearAngle;
      if (repeated || collinear) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return v;
}

}  // namespace

ConvexBody MinkowskiCombination(const ConvexBody& k0, const ConvexBody& k1,
                                double t) {
  Require(t >= 0.0 && t <= 1.0, "minkowski combination needs t in [0, 1]");
  if (t == 0.0) return k0;
  if (t == 1.0) return k1;

  const std::vector<Point> a = ScaledFromBottom(k0, 1.0 - t);
  const std::vector<Point> b = ScaledFromBottom(k1, t);
  const std::size_t na = a.size();
  const std::size_t nb = b.size();

  std::vector<Point> out;
  out.reserve(na + nb);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < na || j < nb) {
    out.push_back(a[i % na] + b[j % nb]);
    if (i == na) {
      ++j;
      continue;
    }
    if (j == nb) {
      ++i;
      continue;
    }
    const double cr = Cross(a[(i + 1) % na] - a[i], b[(j + 1) % nb] - b[j]);
    if (cr >= 0.0) ++i;
    if (cr <= 0.0) ++j;
  }
  return ConvexBody::FromVertices(MergeCollinear(std::move(out)));
}

ConvexBody RegularPolygon(int m, double circumradius, Point center,
                          double phase) {
  Require(m >= 3, "regular polygon needs m >= 3");
  Require(circumradius > 0.0, "regular polygon needs a positive radius");
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / m;
    v.push_back({center.x + circumradius * std::cos(a),
                 center.y + circumradius * std::sin(a)});
  }
  return ConvexBody::FromVertices(std::move(v));
}

ConvexBody Rectangle(double xmin, double xmax, double ymin, double ymax) {
  return ConvexBody::FromVertices(
      {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
}

ConvexBody MatchingBall(const ConvexBody& body, int m) {
  Require(m >= 16, "matching ball needs at least 16 vertices");
  const double target = MeanWidth(body);
  const double per_radius =
      2.0 * m * std::sin(std::numbers::pi / m) / std::numbers::pi;
  return RegularPolygon(m, target / per_radius);
}

bool Contains(const ConvexBody& body, Point x) {
  const auto v = body.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % v.size()];
    if (!(Cross(b - a, x - a) > 0.0)) return false;
  }
  return true;
}

bool ContainsClosed(const ConvexBody& body, Point x, double slack) {
  const auto v = body.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point e = v[(i + 1) % v.size()] - a;
    if (Cross(e, x - a) < -slack * Norm(e)) return false;
  }
  return true;
}

bool IsSubset(const ConvexBody& inner, const ConvexBody& outer, double slack) {
  for (const Point& p : inner.vertices()) {
    if (!ContainsClosed(outer, p, slack)) return false;
  }
  return true;
}

std::vector<Point> ReadVertexList(std::istream& in) {
  std::vector<Point> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Point p;
    std::string extra;
    if (!(ls >> p.x >> p.y) || (ls >> extra)) {
      Fail(ErrorCode::kIo, "vertex list line " + std::to_string(lineno) +
                               ": expected \"x y\"");
    }
    out.push_back(p);
  }
  return out;
}

void WriteVertexList(const ConvexBody& body, std::ostream& out) {
  const auto old = out.precision(17);
  for (const Point& p : body.vertices()) out << p.x << ' ' << p.y << '\n';
  out.precision(old);
}

std::uint64_t Digest(const ConvexBody& body) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Point& p : body.vertices()) {
    for (double c : {p.x, p.y}) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &c, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

}  // namespace gpf
