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

#include "gpf/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "json.hpp"

#include "gpf/error.hpp"

namespace gpf {

Grid Grid::Covering(const ConvexBody& body, double h, int ghost) {
  return CoveringBox(body.BoundingBox(), h, ghost);
}

Grid Grid::CoveringBox(Box box, double h, int ghost) {
  Require(h > 0.0 && std::isfinite(h), "grid spacing must be positive");
  Require(ghost >= 1, "grid needs at least one ghost layer");
  const double i0 = std::floor(box.lo.x / h) - ghost;
  const double j0 = std::floor(box.lo.y / h) - ghost;
  const double i1 = std::ceil(box.hi.x / h) + ghost;
  const double j1 = std::ceil(box.hi.y / h) + ghost;
  Require(i1 - i0 < 1e5 && j1 - j0 < 1e5, "grid would be too large");
  Grid g;
  g.origin = {i0 * h, j0 * h};
  g.h = h;
  g.nx = static_cast<int>(i1 - i0) + 1;
  g.ny = static_cast<int>(j1 - j0) + 1;
  return g;
}

void Grid::Validate() const {
  Require(h > 0.0 && std::isfinite(h), "grid spacing must be positive");
  Require(nx >= 3 && ny >= 3, "grid needs at least 3 nodes per axis");
}

MaskedField::MaskedField(Grid grid, std::vector<std::uint8_t> mask,
                         std::vector<double> values)
    : grid_(grid), mask_(std::move(mask)), values_(std::move(values)) {
  grid_.Validate();
  Require(mask_.size() == grid_.size(), "mask size does not match the grid");
  if (values_.empty()) values_.assign(grid_.size(), 0.0);
  Require(values_.size() == grid_.size(), "value count does not match the grid");
  for (std::size_t n = 0; n < mask_.size(); ++n) {
    if (mask_[n]) {
      mask_[n] = 1;
      ++interior_count_;
    } else {
      values_[n] = 0.0;
    }
  }
  if (interior_count_ == 0) {
    Fail(ErrorCode::kDegenerate, "mask has no interior node");
  }
}

MaskedField MaskedField::WithValues(std::vector<double> values) const {
  return MaskedField(grid_, mask_, std::move(values));
}

MaskedField MaskedField::Scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return WithValues(std::move(v));
}

double MaskedField::Sup() const {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (mask_[n]) s = std::max(s, values_[n]);
  }
  return s;
}

double MaskedField::Inf() const {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (mask_[n]) s = std::min(s, values_[n]);
  }
  return s;
}

MaskedField Rasterize(const ConvexBody& body, const Grid& grid) {
  grid.Validate();
  const Box b = body.BoundingBox();
  const Point lo = grid.Node(1, 1);
  const Point hi = grid.Node(grid.nx - 2, grid.ny - 2);
  if (b.lo.x < lo.x || b.lo.y < lo.y || b.hi.x > hi.x || b.hi.y > hi.y) {
    Fail(ErrorCode::kInvalidArgument,
         "body exceeds the grid box (one ghost layer required)");
  }
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      mask[grid.Index(i, j)] = Contains(body, grid.Node(i, j)) ? 1 : 0;
    }
  }
  return MaskedField(grid, std::move(mask));
}

double GaussianWeight(Point x) {
  return std::exp(-0.5 * (x.x * x.x + x.y * x.y)) / (2.0 * std::numbers::pi);
}

double GaussianWeight1d(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<Point> Gradient(const MaskedField& u) {
  const Grid& g = u.grid();
  std::vector<Point> out(g.size());
  const auto v = u.values();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      Point d;
      if (i == 0) {
        d.x = (v[g.Index(1, j)] - v[g.Index(0, j)]) / g.h;
      } else if (i == g.nx - 1) {
        d.x = (v[g.Index(i, j)] - v[g.Index(i - 1, j)]) / g.h;
      } else {
        d.x = (v[g.Index(i + 1, j)] - v[g.Index(i - 1, j)]) / (2.0 * g.h);
      }
      if (j == 0) {
        d.y = (v[g.Index(i, 1)] - v[g.Index(i, 0)]) / g.h;
      } else if (j == g.ny - 1) {
        d.y = (v[g.Index(i, j)] - v[g.Index(i, j - 1)]) / g.h;
      } else {
        d.y = (v[g.Index(i, j + 1)] - v[g.Index(i, j - 1)]) / (2.0 * g.h);
      }
      out[g.Index(i, j)] = d;
    }
  }
  return out;
}

std::array<Point, 4> CornerGradients(const MaskedField& u, int i, int j) {
  const Grid& g = u.grid();
  const auto v = u.values();
  const double u00 = v[g.Index(i, j)];
  const double u10 = v[g.Index(i + 1, j)];
  const double u01 = v[g.Index(i, j + 1)];
  const double u11 = v[g.Index(i + 1, j + 1)];
  const double bottom = (u10 - u00) / g.h;
  const double top = (u11 - u01) / g.h;
  const double left = (u01 - u00) / g.h;
  const double right = (u11 - u10) / g.h;
  return {Point{bottom, left}, Point{bottom, right}, Point{top, left},
          Point{top, right}};
}

bool CellActive(const MaskedField& u, int i, int j) {
  return u.interior(i, j) || u.interior(i + 1, j) || u.interior(i, j + 1) ||
         u.interior(i + 1, j + 1);
}

namespace {

// |v|^p with the convention 0^p = 0.
double PowAbs(double v, double p) {
  const double a = std::abs(v);
  if (a == 0.0) return 0.0;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// s^{p/2} for s >= 0. The p = 3 branch is exactly homogeneous under
// power-of-two scaling.
double PowHalf(double s, double p) {
  if (s == 0.0) return 0.0;
  if (p == 2.0) return s;
  if (p == 3.0) return s * std::sqrt(s);
  return std::pow(s, 0.5 * p);
}

}  // namespace

double IntegrateP(const MaskedField& u, double p, Integrand mode) {
  Require(p > 1.0, "integrate_p needs p > 1");
  const Grid& g = u.grid();
  const double h2 = g.h * g.h;
  double sum = 0.0;
  if (mode == Integrand::kValues) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (!u.interior(i, j)) continue;
        sum += GaussianWeight(g.Node(i, j)) * PowAbs(u.at(i, j), p);
      }
    }
    return h2 * sum;
  }
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      if (!CellActive(u, i, j)) continue;
      const auto grads = CornerGradients(u, i, j);
      double cell = 0.0;
      for (const Point& gr : grads) {
        const double s = gr.x * gr.x + gr.y * gr.y;
        cell += PowHalf(s, p);
      }
      const Point c{g.origin.x + (i + 0.5) * g.h, g.origin.y + (j + 0.5) * g.h};
      sum += GaussianWeight(c) * cell;
    }
  }
  return 0.25 * h2 * sum;
}

double RayleighQuotient(const MaskedField& u, double p) {
  const double den = IntegrateP(u, p, Integrand::kValues);
  if (!(den > 0.0)) {
    Fail(ErrorCode::kDegenerate, "rayleigh quotient of a zero field");
  }
  return IntegrateP(u, p, Integrand::kGradient) / den;
}

double Interpolate(const MaskedField& u, Point x) {
  const Grid& g = u.grid();
  const double fx = (x.x - g.origin.x) / g.h;
  const double fy = (x.y - g.origin.y) / g.h;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= g.nx - 1 && fy <= g.ny - 1)) {
    return 0.0;
  }
  int i = std::min(static_cast<int>(fx), g.nx - 2);
  int j = std::min(static_cast<int>(fy), g.ny - 2);
  const double a = fx - i;
  const double b = fy - j;
  const auto v = u.values();
  return (1 - a) * (1 - b) * v[g.Index(i, j)] + a * (1 - b) * v[g.Index(i + 1, j)] +
         (1 - a) * b * v[g.Index(i, j + 1)] + a * b * v[g.Index(i + 1, j + 1)];
}

Point InterpolateVector(const Grid& g, std::span<const Point> f, Point x) {
  const double fx = (x.x - g.origin.x) / g.h;
  const double fy = (x.y - g.origin.y) / g.h;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= g.nx - 1 && fy <= g.ny - 1)) {
    return {};
  }
  int i = std::min(static_cast<int>(fx), g.nx - 2);
  int j = std::min(static_cast<int>(fy), g.ny - 2);
  const double a = fx - i;
  const double b = fy - j;
  const Point p00 = f[g.Index(i, j)];
  const Point p10 = f[g.Index(i + 1, j)];
  const Point p01 = f[g.Index(i, j + 1)];
  const Point p11 = f[g.Index(i + 1, j + 1)];
  return (1 - a) * (1 - b) * p00 + a * (1 - b) * p10 + (1 - a) * b * p01 +
         a * b * p11;
}

void WriteFieldCsv(const MaskedField& u, std::ostream& out) {
  const Grid& g = u.grid();
  const auto old = out.precision(17);
  out << "x,y,mask,value\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Point x = g.Node(i, j);
      out << x.x << ',' << x.y << ',' << (u.interior(i, j) ? 1 : 0) << ','
          << u.at(i, j) << '\n';
    }
  }
  out.precision(old);
}

void WriteFieldPgm(const MaskedField& u, const std::string& path) {
  const Grid& g = u.grid();
  const auto v = u.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path);
  out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      const double s = (u.at(i, j) - lo) / span;
      out.put(static_cast<char>(
          static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0)))));
    }
  }
  if (!out) Fail(ErrorCode::kIo, "failed writing " + path);

  nlohmann::ordered_json side;
  side["format"] = "P5";
  side["width"] = g.nx;
  side["height"] = g.ny;
  side["maxval"] = 255;
  side["row_order"] = "top row is the largest y";
  side["value_at_0"] = lo;
  side["value_at_255"] = lo + span;
  side["origin"] = {g.origin.x, g.origin.y};
  side["h"] = g.h;
  std::ofstream js(path + ".json");
  if (!js) Fail(ErrorCode::kIo, "cannot open " + path + ".json");
  js << side.dump(2) << '\n';
}

}  // namespace gpf
