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

#include "gpf/convolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "gpf/error.hpp"

namespace gpf {

SupConvParams SupConvParams::ForExponent(double p, double epsilon) {
  Require(p > 1.0, "sup-convolution exponent rule needs p > 1");
  return SupConvParams{.epsilon = epsilon, .q = std::max(2.0, p / (p - 1.0))};
}

void SupConvParams::Validate() const {
  Require(epsilon > 0.0 && std::isfinite(epsilon),
          "sup-convolution needs epsilon > 0");
  Require(q >= 2.0 && std::isfinite(q), "sup-convolution needs q >= 2");
}

double SupConvParams::Penalty(double dist2) const {
  if (q == 2.0) return dist2 / (2.0 * epsilon);
  return std::pow(dist2, 0.5 * q) / (q * std::pow(epsilon, q - 1.0));
}

namespace {

struct Node {
  int i;
  int j;
  double value;
};

std::vector<Node> InteriorNodes(const MaskedField& u) {
  const Grid& g = u.grid();
  std::vector<Node> out;
  out.reserve(u.interior_count());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (u.interior(i, j)) out.push_back({i, j, u.at(i, j)});
    }
  }
  return out;
}

// Squared distance between nodes from integer offsets, shared by every
// sup-convolution path so that all of them round identically.
double Dist2(int di, int dj, double h) {
  return static_cast<double>(di * di + dj * dj) * (h * h);
}

}  // namespace

MaskedField SupConvolution(const MaskedField& u, const SupConvParams& prm) {
  prm.Validate();
  const Grid& g = u.grid();
  const std::vector<Node> nodes = InteriorNodes(u);
  std::vector<double> out(g.size(), 0.0);
  for (const Node& x : nodes) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Node& y : nodes) {
      const double v = y.value - prm.Penalty(Dist2(y.i - x.i, y.j - x.j, g.h));
      best = std::max(best, v);
    }
    out[g.Index(x.i, x.j)] = best;
  }
  return u.WithValues(std::move(out));
}

MaskedField SupConvolutionFast(const MaskedField& u, const SupConvParams& prm) {
  prm.Validate();
  const Grid& g = u.grid();
  const double top = u.Sup();
  const double scale = prm.q * std::pow(prm.epsilon, prm.q - 1.0);
  std::vector<double> out(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!u.interior(i, j)) continue;
      // Any y beating the y = x candidate has penalty <= top - u(x).
      const double reach =
          std::pow(std::max(0.0, top - u.at(i, j)) * scale, 1.0 / prm.q);
      const int w = static_cast<int>(std::ceil(reach / g.h)) + 1;
      double best = -std::numeric_limits<double>::infinity();
      for (int jj = std::max(0, j - w); jj <= std::min(g.ny - 1, j + w); ++jj) {
        for (int ii = std::max(0, i - w); ii <= std::min(g.nx - 1, i + w); ++ii) {
          if (!u.interior(ii, jj)) continue;
          const double v = u.at(ii, jj) - prm.Penalty(Dist2(ii - i, jj - j, g.h));
          best = std::max(best, v);
        }
      }
      out[g.Index(i, j)] = best;
    }
  }
  return u.WithValues(std::move(out));
}

double AttainmentRadius(const MaskedField& u, const SupConvParams& prm) {
  prm.Validate();
  const double osc = u.Sup() - u.Inf();
  return std::pow(prm.q * std::pow(prm.epsilon, prm.q - 1.0) * osc,
                  1.0 / prm.q);
}

double LipschitzConstant(const MaskedField& u) {
  const std::vector<Node> nodes = InteriorNodes(u);
  const double h = u.grid().h;
  double lip = 0.0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double d = std::sqrt(
          Dist2(nodes[b].i - nodes[a].i, nodes[b].j - nodes[a].j, h));
      lip = std::max(lip, std::abs(nodes[b].value - nodes[a].value) / d);
    }
  }
  return lip;
}

double SemiconvexityConstant(const SupConvParams& prm, double lipschitz) {
  prm.Validate();
  Require(lipschitz >= 0.0, "Lipschitz constant must be nonnegative");
  return (prm.q - 1.0) / prm.epsilon *
         std::pow(lipschitz, (prm.q - 2.0) / (prm.q - 1.0));
}

namespace {

// Euclidean distance from each interior node to the nearest non-interior
// node, counting positions just off the grid as non-interior.
std::vector<double> DistanceToExterior(const MaskedField& u) {
  const Grid& g = u.grid();
  auto exterior = [&](int i, int j) {
    return i < 0 || j < 0 || i >= g.nx || j >= g.ny || !u.interior(i, j);
  };
  // The nearest exterior node always has an interior 4-neighbour: stepping
  // from it toward x along its dominant axis gets strictly closer.
  std::vector<std::array<int, 2>> rim;
  for (int j = -1; j <= g.ny; ++j) {
    for (int i = -1; i <= g.nx; ++i) {
      if (!exterior(i, j)) continue;
      if (!exterior(i - 1, j) || !exterior(i + 1, j) || !exterior(i, j - 1) ||
          !exterior(i, j + 1)) {
        rim.push_back({i, j});
      }
    }
  }
  std::vector<double> dist(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (exterior(i, j)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : rim) best = std::min(best, Dist2(r[0] - i, r[1] - j, g.h));
      dist[g.Index(i, j)] = std::sqrt(best);
    }
  }
  return dist;
}

}  // namespace

SemiconvexityResult SemiconvexityDefect(const MaskedField& u, double c,
                                        double margin) {
  const Grid& g = u.grid();
  const std::vector<double> dist = DistanceToExterior(u);
  auto f = [&](int i, int j) {
    const Point x = g.Node(i, j);
    return u.at(i, j) + c * Dot(x, x);
  };
  constexpr std::array<std::array<int, 2>, 4> kDirs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  SemiconvexityResult r{.defect = std::numeric_limits<double>::infinity()};
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      if (!u.interior(i, j) || !(dist[g.Index(i, j)] > margin)) continue;
      bool checked = false;
      for (const auto& d : kDirs) {
        if (!u.interior(i + d[0], j + d[1]) || !u.interior(i - d[0], j - d[1])) {
          continue;
        }
        const double s2 = Dist2(d[0], d[1], g.h);
        const double second =
            (f(i + d[0], j + d[1]) + f(i - d[0], j - d[1]) - 2.0 * f(i, j)) / s2;
        r.defect = std::min(r.defect, second);
        checked = true;
      }
      if (checked) ++r.nodes_checked;
    }
  }
  return r;
}

void CombinationParams::Validate() const {
  Require(t >= 0.0 && t <= 1.0, "sup-combination needs t in [0, 1]");
}

namespace {

struct Weighted {
  Point x;
  double factor;  // the node value raised to its exponent
};

// Interior nodes with their powered values, largest factor first (node
// order among equals).
std::vector<Weighted> PoweredNodes(const MaskedField& u, double exponent) {
  std::vector<Weighted> out;
  const Grid& g = u.grid();
  for (const Node& n : InteriorNodes(u)) {
    out.push_back({g.Node(n.i, n.j), std::pow(n.value, exponent)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Weighted& a, const Weighted& b) {
    return a.factor > b.factor;
  });
  return out;
}

bool SameSpacing(const Grid& a, const Grid& b) {
  return std::abs(a.h - b.h) <= 1e-12 * a.h;
}

}  // namespace

CombinationResult SupCombination(const MaskedField& u0, const MaskedField& u1,
                                 const MaskedField& target,
                                 const CombinationParams& prm) {
  prm.Validate();
  const Grid& g = target.grid();
  Require(SameSpacing(u0.grid(), g) && SameSpacing(u1.grid(), g),
          "sup-combination fields must share the grid spacing");
  Require(u0.Inf() >= 0.0 && u1.Inf() >= 0.0,
          "sup-combination needs nonnegative fields");
  const double t = prm.t;
  const double s = 1.0 - t;

  std::vector<double> best(g.size(), 0.0);
  std::vector<OptimalPair> pair_at(g.size());

  if (prm.mode == CombinationMode::kInterpolated) {
    // Enumerate the side whose preimage map has the smaller magnification.
    const bool enum_u1 = t <= 0.5;
    const MaskedField& fixed = enum_u1 ? u1 : u0;
    const MaskedField& interp = enum_u1 ? u0 : u1;
    const double e_fixed = enum_u1 ? t : s;
    const double e_interp = enum_u1 ? s : t;
    const std::vector<Weighted> nodes = PoweredNodes(fixed, e_fixed);
    // Bilinear values never exceed the field's sup.
    const double bound = std::pow(interp.Sup(), e_interp) * (1.0 + 1e-12);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (!target.interior(i, j)) continue;
        const Point x = g.Node(i, j);
        const std::size_t k = g.Index(i, j);
        for (const Weighted& n : nodes) {
          if (!(n.factor * bound > best[k])) break;
          const Point y = (1.0 / e_interp) * (x - e_fixed * n.x);
          const double v = Interpolate(interp, y);
          if (!(v > 0.0)) continue;
          const double value = std::pow(v, e_interp) * n.factor;
          if (value > best[k]) {
            best[k] = value;
            pair_at[k] = enum_u1 ? OptimalPair{x, y, n.x, value}
                                 : OptimalPair{x, n.x, y, value};
          }
        }
      }
    }
  } else {
    const double r = prm.snap_radius >= 0.0 ? prm.snap_radius : 0.5 * g.h;
    const std::vector<Weighted> a = PoweredNodes(u0, s);
    const std::vector<Weighted> b = PoweredNodes(u1, t);
    for (const Weighted& n0 : a) {
      if (!(n0.factor > 0.0)) break;
      for (const Weighted& n1 : b) {
        const double value = n0.factor * n1.factor;
        if (!(value > 0.0)) break;
        const Point z = s * n0.x + t * n1.x;
        const int i_lo = static_cast<int>(std::ceil((z.x - r - g.origin.x) / g.h));
        const int i_hi = static_cast<int>(std::floor((z.x + r - g.origin.x) / g.h));
        const int j_lo = static_cast<int>(std::ceil((z.y - r - g.origin.y) / g.h));
        const int j_hi = static_cast<int>(std::floor((z.y + r - g.origin.y) / g.h));
        for (int j = std::max(0, j_lo); j <= std::min(g.ny - 1, j_hi); ++j) {
          for (int i = std::max(0, i_lo); i <= std::min(g.nx - 1, i_hi); ++i) {
            if (!target.interior(i, j)) continue;
            const Point x = g.Node(i, j);
            const Point d = z - x;
            if (Dot(d, d) > r * r) continue;
            const std::size_t k = g.Index(i, j);
            if (value > best[k]) {
              best[k] = value;
              pair_at[k] = OptimalPair{x, n0.x, n1.x, value};
            }
          }
        }
      }
    }
  }

  CombinationResult out{.u = target.WithValues(best), .pairs = {}, .empty_nodes = 0};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!target.interior(i, j)) continue;
      const std::size_t k = g.Index(i, j);
      if (best[k] > 0.0) {
        out.pairs.push_back(pair_at[k]);
      } else {
        ++out.empty_nodes;
      }
    }
  }
  return out;
}

namespace {

// Bilinear interpolation of corner central differences; empty unless the
// cell's corners and their axis neighbours are all interior.
std::optional<Point> LocalGradient(const MaskedField& u, Point x) {
  const Grid& g = u.grid();
  const double fx = (x.x - g.origin.x) / g.h;
  const double fy = (x.y - g.origin.y) / g.h;
  if (!(fx >= 1.0 && fy >= 1.0 && fx <= g.nx - 2 && fy <= g.ny - 2)) return {};
  const int i = std::min(static_cast<int>(fx), g.nx - 3);
  const int j = std::min(static_cast<int>(fy), g.ny - 3);
  std::array<Point, 4> grad;
  int k = 0;
  for (int dj = 0; dj <= 1; ++dj) {
    for (int di = 0; di <= 1; ++di, ++k) {
      const int a = i + di;
      const int b = j + dj;
      if (!u.interior(a, b) || !u.interior(a - 1, b) || !u.interior(a + 1, b) ||
          !u.interior(a, b - 1) || !u.interior(a, b + 1)) {
        return {};
      }
      grad[k] = {(u.at(a + 1, b) - u.at(a - 1, b)) / (2.0 * g.h),
                 (u.at(a, b + 1) - u.at(a, b - 1)) / (2.0 * g.h)};
    }
  }
  const double s = fx - i;
  const double r = fy - j;
  return (1 - s) * (1 - r) * grad[0] + s * (1 - r) * grad[1] +
         (1 - s) * r * grad[2] + s * r * grad[3];
}

}  // namespace

std::optional<double> ArgmaxPairCheck(const MaskedField& u0,
                                      const MaskedField& u1,
                                      const OptimalPair& pair,
                                      double threshold) {
  const double v0 = Interpolate(u0, pair.x0);
  const double v1 = Interpolate(u1, pair.x1);
  if (!(v0 > threshold) || !(v1 > threshold)) return {};
  const auto g0 = LocalGradient(u0, pair.x0);
  const auto g1 = LocalGradient(u1, pair.x1);
  if (!g0 || !g1) return {};
  return Norm((1.0 / v0) * *g0 - (1.0 / v1) * *g1);
}

void WritePairTrace(const std::vector<OptimalPair>& pairs, std::ostream& out) {
  const auto old = out.precision(17);
  out << "x,y,x0,y0,x1,y1,value\n";
  for (const OptimalPair& p : pairs) {
    out << p.x.x << ',' << p.x.y << ',' << p.x0.x << ',' << p.x0.y << ','
        << p.x1.x << ',' << p.x1.y << ',' << p.value << '\n';
  }
  out.precision(old);
}

}  // namespace gpf
