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

// Uniform Cartesian grids, interior masks and Gaussian-weighted quadrature.
//
// Discrete energies
// -----------------
// A field u lives on grid nodes and is exactly zero outside the mask (the
// Dirichlet condition by zero extension). Two quadratures are used:
//
//   values:    h^2 * sum_{interior nodes n} w(x_n) |u_n|^p
//   gradient:  sum_{cells c} w(x_c) h^2/4 * sum_{corners k} |g_{c,k}|^p
//
// where x_c is the cell center and g_{c,k} is the one-sided gradient at
// corner k of cell c (the gradients of the two triangulations of the cell).
// Every cell touching an interior node takes part, which is the one-cell
// collar around the mask. At p = 2 the gradient energy is the weighted
// 5-point stiffness form; unlike nodal central differences it has no
// checkerboard null space.

#ifndef GPF_FIELD_HPP_
#define GPF_FIELD_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpf/geometry.hpp"

namespace gpf {

struct Grid {
  Point origin;
  double h = 0.0;
  int nx = 0;
  int ny = 0;

  // Lattice-aligned grid over the body's bounding box inflated by `ghost`
  // cells: node coordinates are integer multiples of h.
  static Grid Covering(const ConvexBody& body, double h, int ghost = 2);
  // Smallest lattice-aligned grid covering the box plus `ghost` cells.
  static Grid CoveringBox(Box box, double h, int ghost = 2);

  void Validate() const;

  Point Node(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
  std::size_t Index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i);
  }
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  Box Bounds() const { return {origin, Node(nx - 1, ny - 1)}; }
  bool operator==(const Grid&) const = default;
};

class MaskedField {
 public:
  // Values default to zero. Non-interior values are forced to exactly zero.
  // Throws kDegenerate if the mask has no interior node.
  MaskedField(Grid grid, std::vector<std::uint8_t> mask,
              std::vector<double> values = {});

  const Grid& grid() const { return grid_; }
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::span<const double> values() const { return values_; }

  bool interior(int i, int j) const { return mask_[grid_.Index(i, j)] != 0; }
  double at(int i, int j) const { return values_[grid_.Index(i, j)]; }
  std::size_t interior_count() const { return interior_count_; }

  // Copy with new values (length must match the grid), zeroed off the mask.
  MaskedField WithValues(std::vector<double> values) const;
  MaskedField Scaled(double c) const;

  double Sup() const;
  double Inf() const;  // over interior nodes

 private:
  Grid grid_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> values_;
  std::size_t interior_count_ = 0;
};

// Node interior iff Contains(body, node). Throws kInvalidArgument when the
// body does not fit inside the grid with one ghost layer, kDegenerate when
// no node is interior.
MaskedField Rasterize(const ConvexBody& body, const Grid& grid);

// (2 pi)^{-1} exp(-|x|^2 / 2).
double GaussianWeight(Point x);
// (2 pi)^{-1/2} exp(-x^2 / 2).
double GaussianWeight1d(double x);

// Central differences at every node with both neighbours on the grid;
// one-sided at the grid edge. Differences see the zero extension.
std::vector<Point> Gradient(const MaskedField& u);

enum class Integrand { kValues, kGradient };

double IntegrateP(const MaskedField& u, double p, Integrand mode);

// IntegrateP(gradient) / IntegrateP(values). Throws kDegenerate on a zero
// denominator.
double RayleighQuotient(const MaskedField& u, double p);

// The four corner gradients of cell (i, j), i.e. the cell with lower-left
// node (i, j). Order: corners (0,0), (1,0), (0,1), (1,1).
std::array<Point, 4> CornerGradients(const MaskedField& u, int i, int j);

// True if any corner of cell (i, j) is interior.
bool CellActive(const MaskedField& u, int i, int j);

// Bilinear interpolation of the zero-extended field; 0 outside the grid.
double Interpolate(const MaskedField& u, Point x);
Point InterpolateVector(const Grid& grid, std::span<const Point> field,
                        Point x);

// CSV with header "x,y,mask,value", rows in node index order.
void WriteFieldCsv(const MaskedField& u, std::ostream& out);
// Binary P5 graymap (top row = largest y) and a sidecar JSON at
// `path + ".json"` recording the linear value scaling.
void WriteFieldPgm(const MaskedField& u, const std::string& path);

}  // namespace gpf

#endif  // GPF_FIELD_HPP_
