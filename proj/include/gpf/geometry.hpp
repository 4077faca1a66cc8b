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

// Convex polygons in the plane: support functions, widths, mean width,
// Minkowski combinations and the origin-centered polygon of equal mean width.
//
// Mean width is the average of the directional width over the unit circle.
// For a planar convex body this equals perimeter / pi (Cauchy's formula); it
// is *not* the perimeter itself. Only equality of mean widths is ever used
// downstream, so the normalization does not affect any comparison.

#ifndef GPF_GEOMETRY_HPP_
#define GPF_GEOMETRY_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gpf {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double Dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double Norm(Point a);

// Unit vector. Construction normalizes; the stored norm is 1 within 1e-12.
class Direction {
 public:
  static Direction FromAngle(double theta);
  // Throws kInvalidArgument for a (near) zero vector.
  static Direction Normalized(double x, double y);

  double x() const { return x_; }
  double y() const { return y_; }
  Point AsPoint() const { return {x_, y_}; }
  Direction operator-() const { return Direction(-x_, -y_); }

 private:
  Direction(double x, double y) : x_(x), y_(y) {}
  double x_;
  double y_;
};

struct Box {
  Point lo;
  Point hi;
};

// Strictly convex polygon, vertices counterclockwise.
class ConvexBody {
 public:
  // Validates: >= 3 vertices, no repeated consecutive vertices, every turn
  // strictly left, and total turning of exactly one revolution. Throws
  // kDegenerate otherwise.
  static ConvexBody FromVertices(std::vector<Point> vertices);

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Box BoundingBox() const;

 private:
  explicit ConvexBody(std::vector<Point> v) : vertices_(std::move(v)) {}
  std::vector<Point> vertices_;
};

double SupportFunction(const ConvexBody& body, Direction y);
double Width(const ConvexBody& body, Direction y);

inline constexpr int kDefaultMeanWidthQuadrature = 4096;

// Uniform angular quadrature of Width over the unit circle.
double MeanWidth(const ConvexBody& body,
                 int quadrature_points = kDefaultMeanWidthQuadrature);

double Perimeter(const ConvexBody& body);
double Area(const ConvexBody& body);

// (1 - t) K0 + t K1, by scaling and merging edge sequences by angle.
// Collinear edges (angle below kCollinearAngle) are merged.
ConvexBody MinkowskiCombination(const ConvexBody& k0, const ConvexBody& k1,
                                double t);

inline constexpr double kCollinearAngle = 1e-12;

// Regular polygon with vertex 0 at angle `phase`.
ConvexBody RegularPolygon(int m, double circumradius, Point center = {},
                          double phase = 0.0);

ConvexBody Rectangle(double xmin, double xmax, double ymin, double ymax);

// Regular m-gon centered at the origin whose mean width equals that of
// `body`. The circumradius comes from the m-gon's own mean-width formula
// 2 m R sin(pi/m) / pi, so the comparison stays discretization consistent.
ConvexBody MatchingBall(const ConvexBody& body, int m);

// Strict interior test: true iff x is strictly left of every edge.
bool Contains(const ConvexBody& body, Point x);

// Closed containment with an absolute slack on every edge half-plane.
bool ContainsClosed(const ConvexBody& body, Point x, double slack = 1e-12);

// Every vertex of `inner` lies in the closure of `outer`.
bool IsSubset(const ConvexBody& inner, const ConvexBody& outer,
              double slack = 1e-12);

// Plain-text vertex list, one "x y" pair per line. Blank lines and lines
// starting with '#' are ignored.
std::vector<Point> ReadVertexList(std::istream& in);
void WriteVertexList(const ConvexBody& body, std::ostream& out);

// FNV-1a over the exact bit patterns of the vertex coordinates.
std::uint64_t Digest(const ConvexBody& body);

}  // namespace gpf

#endif  // GPF_GEOMETRY_HPP_
