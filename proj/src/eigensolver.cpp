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

#include "gpf/eigensolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "gpf/error.hpp"

namespace gpf {

double SolverConfig::EffectiveDelta() const {
  if (delta >= 0.0) return delta;
  return p < 2.0 ? 1e-8 : 0.0;
}

void SolverConfig::Validate() const {
  Require(p > 1.0 && std::isfinite(p), "solver needs p > 1");
  Require(tol > 0.0, "solver tolerance must be positive");
  Require(stall_window >= 1, "stall window must be at least 1");
  Require(max_iter >= 1, "max_iter must be at least 1");
  Require(inner_tol > 0.0, "inner tolerance must be positive");
  Require(residual_tol > 0.0, "residual tolerance must be positive");
  if (p < 2.0) {
    Require(EffectiveDelta() > 0.0, "delta must be positive when p < 2");
  }
}

namespace {

// Local node order inside a cell: (0,0), (1,0), (0,1), (1,1). Corner k's
// gradient is ((u[kX1[k]] - u[kX0[k]]) / h, (u[kY1[k]] - u[kY0[k]]) / h).
constexpr std::array<int, 4> kX0 = {0, 0, 2, 2};
constexpr std::array<int, 4> kX1 = {1, 1, 3, 3};
constexpr std::array<int, 4> kY0 = {0, 1, 0, 1};
constexpr std::array<int, 4> kY1 = {2, 3, 2, 3};

struct Cell {
  std::array<int, 4> id;  // unknown index or -1
  double weight;          // w(center) h^2 / 4
};

// Interior unknowns and active cells of a mask.
class Discretization {
 public:
  explicit Discretization(const MaskedField& mask) : grid_(mask.grid()) {
    const Grid& g = grid_;
    node_id_.assign(g.size(), -1);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (!mask.interior(i, j)) continue;
        node_id_[g.Index(i, j)] = static_cast<int>(node_of_.size());
        node_of_.push_back(g.Index(i, j));
        mass_.push_back(g.h * g.h * GaussianWeight(g.Node(i, j)));
      }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
      for (int i = 0; i + 1 < g.nx; ++i) {
        Cell c;
        c.id = {node_id_[g.Index(i, j)], node_id_[g.Index(i + 1, j)],
                node_id_[g.Index(i, j + 1)], node_id_[g.Index(i + 1, j + 1)]};
        if (c.id[0] < 0 && c.id[1] < 0 && c.id[2] < 0 && c.id[3] < 0) continue;
        const Point center{g.origin.x + (i + 0.5) * g.h,
                           g.origin.y + (j + 0.5) * g.h};
        c.weight = 0.25 * g.h * g.h * GaussianWeight(center);
        cells_.push_back(c);
      }
    }
  }

  int size() const { return static_cast<int>(node_of_.size()); }
  const Grid& grid() const { return grid_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<double>& mass() const { return mass_; }

  Eigen::VectorXd Gather(const MaskedField& u) const {
    Eigen::VectorXd x(size());
    const auto v = u.values();
    for (int n = 0; n < size(); ++n) x[n] = v[node_of_[n]];
    return x;
  }

  std::vector<double> Scatter(const Eigen::VectorXd& x) const {
    std::vector<double> v(grid_.size(), 0.0);
    for (int n = 0; n < size(); ++n) v[node_of_[n]] = x[n];
    return v;
  }

  std::array<double, 4> Local(const Cell& c, const Eigen::VectorXd& x) const {
    std::array<double, 4> loc{};
    for (int a = 0; a < 4; ++a) loc[a] = c.id[a] >= 0 ? x[c.id[a]] : 0.0;
    return loc;
  }

  std::array<Point, 4> Corners(const std::array<double, 4>& loc) const {
    std::array<Point, 4> g;
    for (int k = 0; k < 4; ++k) {
      g[k] = {(loc[kX1[k]] - loc[kX0[k]]) / grid_.h,
              (loc[kY1[k]] - loc[kY0[k]]) / grid_.h};
    }
    return g;
  }

  double Energy(const Eigen::VectorXd& x, double p) const {
    double e = 0.0;
    for (const Cell& c : cells_) {
      const auto g = Corners(Local(c, x));
      double s = 0.0;
      for (const Point& gk : g) s += PowHalf(gk.x * gk.x + gk.y * gk.y, p);
      e += c.weight * s;
    }
    return e;
  }

  double Mass(const Eigen::VectorXd& x, double p) const {
    double m = 0.0;
    for (int n = 0; n < size(); ++n) m += mass_[n] * PowAbs(x[n], p);
    return m;
  }

  // Gradient of Energy / p with coefficients (|g|^2 + delta)^{(p-2)/2}.
  Eigen::VectorXd Flux(const Eigen::VectorXd& x, double p, double delta) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(size());
    const double inv_h = 1.0 / grid_.h;
    for (const Cell& c : cells_) {
      const auto g = Corners(Local(c, x));
      std::array<double, 4> loc_f{};
      for (int k = 0; k < 4; ++k) {
        const double s = g[k].x * g[k].x + g[k].y * g[k].y;
        const double a = Coefficient(s, delta, p);
        const double fx = c.weight * a * g[k].x * inv_h;
        const double fy = c.weight * a * g[k].y * inv_h;
        loc_f[kX1[k]] += fx;
        loc_f[kX0[k]] -= fx;
        loc_f[kY1[k]] += fy;
        loc_f[kY0[k]] -= fy;
      }
      for (int a = 0; a < 4; ++a) {
        if (c.id[a] >= 0) f[c.id[a]] += loc_f[a];
      }
    }
    return f;
  }

  // Gradient of Mass / p.
  Eigen::VectorXd MassFlux(const Eigen::VectorXd& x, double p) const {
    Eigen::VectorXd m(size());
    for (int n = 0; n < size(); ++n) {
      m[n] = mass_[n] * SignedPow(x[n], p - 1.0);
    }
    return m;
  }

  // (|g|^2 + delta)^{(p-2)/2}; zero-gradient corners with delta = 0 carry no
  // flux, so the coefficient is reported as 0 there.
  static double Coefficient(double s, double delta, double p) {
    if (p == 2.0) return 1.0;
    const double q = s + delta;
    if (q == 0.0) return 0.0;
    if (p == 3.0) return std::sqrt(q);
    return std::pow(q, 0.5 * (p - 2.0));
  }

  // s^{p/2} for s >= 0.
  static double PowHalf(double s, double p) {
    if (s == 0.0) return 0.0;
    if (p == 2.0) return s;
    if (p == 3.0) return s * std::sqrt(s);
    return std::pow(s, 0.5 * p);
  }

  static double PowAbs(double v, double p) {
    const double a = std::abs(v);
    if (a == 0.0) return 0.0;
    if (p == 2.0) return a * a;
    return std::pow(a, p);
  }

  static double SignedPow(double v, double e) {
    if (v == 0.0) return 0.0;
    if (e == 1.0) return v;
    return std::copysign(std::pow(std::abs(v), e), v);
  }

 private:
  Grid grid_;
  std::vector<int> node_id_;
  std::vector<std::size_t> node_of_;
  std::vector<double> mass_;
  std::vector<Cell> cells_;
};

// Frozen linearization of the flux: sum over corners of
// w a (I + (p-2) g g^T / (|g|^2 + delta)) in gradient space, a the
// coefficient above. Symmetric positive definite for p > 1, delta > 0.
class Linearization {
 public:
  explicit Linearization(const Discretization& d) : disc_(d) {
    std::vector<Eigen::Triplet<double>> trip;
    const auto& cells = d.cells();
    trip.reserve(cells.size() * 16);
    for (const Cell& c : cells) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (c.id[a] >= 0 && c.id[b] >= 0) trip.emplace_back(c.id[a], c.id[b], 0.0);
        }
      }
    }
    matrix_.resize(d.size(), d.size());
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    slots_.resize(cells.size() * 16, -1);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const Cell& c = cells[ci];
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (c.id[a] < 0 || c.id[b] < 0) continue;
          const int col = c.id[b];
          const int* rows = matrix_.innerIndexPtr();
          const int begin = matrix_.outerIndexPtr()[col];
          const int end = matrix_.outerIndexPtr()[col + 1];
          const int* it = std::lower_bound(rows + begin, rows + end, c.id[a]);
          slots_[ci * 16 + a * 4 + b] = static_cast<int>(it - rows);
        }
      }
    }
    solver_.analyzePattern(matrix_);
  }

  void Assemble(const Eigen::VectorXd& x, double p, double delta) {
    double* val = matrix_.valuePtr();
    std::fill(val, val + matrix_.nonZeros(), 0.0);
    const auto& cells = disc_.cells();
    const double inv_h = 1.0 / disc_.grid().h;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const Cell& c = cells[ci];
      const auto g = disc_.Corners(disc_.Local(c, x));
      std::array<double, 16> loc{};
      for (int k = 0; k < 4; ++k) {
        const double s = g[k].x * g[k].x + g[k].y * g[k].y;
        const double a = Discretization::Coefficient(s, delta, p);
        const double beta =
            (p == 2.0 || s + delta == 0.0) ? 0.0 : (p - 2.0) / (s + delta);
        // 2x2 gradient-space tensor.
        const double txx = c.weight * a * (1.0 + beta * g[k].x * g[k].x);
        const double tyy = c.weight * a * (1.0 + beta * g[k].y * g[k].y);
        const double txy = c.weight * a * beta * g[k].x * g[k].y;
        // d gx / d u_local and d gy / d u_local.
        std::array<double, 4> bx{};
        std::array<double, 4> by{};
        bx[kX1[k]] += inv_h;
        bx[kX0[k]] -= inv_h;
        by[kY1[k]] += inv_h;
        by[kY0[k]] -= inv_h;
        for (int r = 0; r < 4; ++r) {
          for (int s2 = 0; s2 < 4; ++s2) {
            loc[r * 4 + s2] += txx * bx[r] * bx[s2] + tyy * by[r] * by[s2] +
                               txy * (bx[r] * by[s2] + by[r] * bx[s2]);
          }
        }
      }
      for (int e = 0; e < 16; ++e) {
        const int slot = slots_[ci * 16 + e];
        if (slot >= 0) val[slot] += loc[e];
      }
    }
  }

  bool Factorize() {
    solver_.factorize(matrix_);
    return solver_.info() == Eigen::Success;
  }

  // Solves matrix * y = rhs with up to two steps of iterative refinement.
  Eigen::VectorXd Solve(const Eigen::VectorXd& rhs, double rel_tol) const {
    Eigen::VectorXd y = solver_.solve(rhs);
    const double scale = std::max(rhs.norm(), 1e-300);
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd res = rhs - matrix_ * y;
      if (res.norm() <= rel_tol * scale) break;
      y += solver_.solve(res);
    }
    return y;
  }

  Eigen::VectorXd Diagonal() const { return matrix_.diagonal(); }

 private:
  const Discretization& disc_;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<int> slots_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

void NormalizeSup(Eigen::VectorXd& x) {
  const double s = x.maxCoeff();
  if (s > 0.0) x /= s;
}

}  // namespace

std::vector<double> ApplyOperator(const MaskedField& u, double p, double delta) {
  Require(p > 1.0, "operator needs p > 1");
  Require(delta >= 0.0, "delta must be nonnegative");
  const Discretization d(u);
  const Eigen::VectorXd f = d.Flux(d.Gather(u), p, delta);
  Eigen::VectorXd a(d.size());
  for (int n = 0; n < d.size(); ++n) a[n] = f[n] / d.mass()[n];
  return d.Scatter(a);
}

double WeakResidual(const MaskedField& u, double lambda, double p) {
  const Discretization d(u);
  const Eigen::VectorXd x = d.Gather(u);
  const Eigen::VectorXd r = d.Flux(x, p, 0.0) - lambda * d.MassFlux(x, p);
  return d.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
}

double StrongResidual(const MaskedField& u, double lambda, double p) {
  const Discretization d(u);
  const Eigen::VectorXd x = d.Gather(u);
  const Eigen::VectorXd r = d.Flux(x, p, 0.0) - lambda * d.MassFlux(x, p);
  double out = 0.0;
  for (int n = 0; n < d.size(); ++n) {
    out = std::max(out, std::abs(r[n]) / d.mass()[n]);
  }
  return out;
}

MaskedField DistanceToBoundary(const MaskedField& mask) {
  const Grid& g = mask.grid();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(g.size(), inf);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!mask.interior(i, j)) d[g.Index(i, j)] = 0.0;
    }
  }
  const double a = g.h;
  const double b = g.h * std::sqrt(2.0);
  auto relax = [&](int i, int j, int di, int dj, double w) {
    const int ii = i + di;
    const int jj = j + dj;
    if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny) return;
    double& cur = d[g.Index(i, j)];
    cur = std::min(cur, d[g.Index(ii, jj)] + w);
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      relax(i, j, -1, 0, a);
      relax(i, j, 0, -1, a);
      relax(i, j, -1, -1, b);
      relax(i, j, 1, -1, b);
    }
  }
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = g.nx - 1; i >= 0; --i) {
      relax(i, j, 1, 0, a);
      relax(i, j, 0, 1, a);
      relax(i, j, 1, 1, b);
      relax(i, j, -1, 1, b);
    }
  }
  for (double& v : d) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return mask.WithValues(std::move(d));
}

EigenResult SolvePrincipal(const ConvexBody& body, const Grid& grid,
                           const SolverConfig& cfg) {
  return SolvePrincipal(Rasterize(body, grid), cfg);
}

EigenResult SolvePrincipal(const MaskedField& mask, const SolverConfig& cfg,
                           const std::optional<MaskedField>& initial) {
  cfg.Validate();
  const double p = cfg.p;
  const Discretization disc(mask);
  const int n = disc.size();

  Eigen::VectorXd x;
  if (initial) {
    Require(initial->grid() == mask.grid(), "initial field is on another grid");
    x = disc.Gather(*initial).cwiseMax(0.0);
  } else if (cfg.init == Initialization::kOracle &&
             static_cast<std::size_t>(n) <= kOracleMaxUnknowns) {
    x = disc.Gather(DenseOracleP2(mask).u);
  } else if (cfg.init == Initialization::kRandom) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    x.resize(n);
    for (int k = 0; k < n; ++k) x[k] = unif(rng);
  } else {
    x = disc.Gather(DistanceToBoundary(mask));
  }
  if (!(x.maxCoeff() > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "initial field has no positive value");
  }
  NormalizeSup(x);

  // The quotient itself never sees delta; it only regularizes the frozen
  // linearization. For p > 2 a floor keeps that matrix definite where the
  // gradient vanishes.
  const double delta = cfg.EffectiveDelta();
  double lin_delta = p > 2.0 ? std::max(delta, 1e-10) : delta;

  Linearization lin(disc);
  double energy = disc.Energy(x, p);
  double mass = disc.Mass(x, p);
  double quotient = energy / mass;

  int stalled = 0;
  Eigen::VectorXd prev_step;
  int iterations = 0;
  int fallback_steps = 0;
  bool converged = false;
  double last_decrease = std::numeric_limits<double>::infinity();

  auto residual_ratio = [&]() {
    const Eigen::VectorXd r = disc.Flux(x, p, 0.0) - quotient * disc.MassFlux(x, p);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(r[k]) / disc.mass()[k]);
    return worst / quotient;
  };
  // For p < 2 the regularized linearization underestimates the curvature
  // where the gradient vanishes, so the quotient can stall while the
  // residual at such nodes is still large. Shrink delta and keep going.
  auto refine_delta = [&]() {
    if (p >= 2.0 || lin_delta < 1e-20 || residual_ratio() <= cfg.residual_tol) {
      return false;
    }
    lin_delta *= 1e-2;
    stalled = 0;
    prev_step.resize(0);
    return true;
  };

  auto try_direction = [&](const Eigen::VectorXd& dir, double slope,
                           Eigen::VectorXd& out, double& out_q) {
    double alpha = 1.0;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      Eigen::VectorXd cand = (x + alpha * dir).cwiseMax(0.0);
      const double m = disc.Mass(cand, p);
      if (!(m > 0.0)) continue;
      const double q = disc.Energy(cand, p) / m;
      if (q <= quotient + 1e-4 * alpha * slope) {
        out = std::move(cand);
        out_q = q;
        return true;
      }
    }
    return false;
  };

  while (iterations < cfg.max_iter) {
    ++iterations;
    const Eigen::VectorXd residual =
        disc.Flux(x, p, 0.0) - quotient * disc.MassFlux(x, p);
    // Directional derivative of the quotient is (p / M) <residual, d>.
    const double grad_scale = p / mass;

    Eigen::VectorXd next;
    double next_q = quotient;
    bool accepted = false;

    lin.Assemble(x, p, lin_delta);
    if (lin.Factorize()) {
      const Eigen::VectorXd dir = -lin.Solve(residual, cfg.inner_tol);
      const double slope = grad_scale * residual.dot(dir);
      if (slope < 0.0) accepted = try_direction(dir, slope, next, next_q);
    }
    if (!accepted) {
      // Projected, diagonally scaled gradient descent with Armijo search.
      const Eigen::VectorXd diag = lin.Diagonal().cwiseMax(1e-300);
      const Eigen::VectorXd dir = -residual.cwiseQuotient(diag);
      const double slope = grad_scale * residual.dot(dir);
      if (slope < 0.0) accepted = try_direction(dir, slope, next, next_q);
      if (accepted) ++fallback_steps;
    }
    if (!accepted) {
      if (refine_delta()) continue;
      // No representable decrease left in any direction.
      converged = true;
      last_decrease = 0.0;
      break;
    }

    NormalizeSup(next);
    // Momentum: extend the accepted point along the previous step while the
    // quotient drops. Skipped once the Newton steps alone converge fast.
    if (prev_step.size() == n && (quotient - next_q) > 1e-8 * quotient) {
      double best_b = 0.0;
      double best_q = next_q;
      for (double sign : {1.0, -1.0}) {
        for (double b = 0.125; b <= 64.0; b *= 2.0) {
          const Eigen::VectorXd c = (next + sign * b * prev_step).cwiseMax(0.0);
          const double m = disc.Mass(c, p);
          const double q = m > 0.0 ? disc.Energy(c, p) / m
                                   : std::numeric_limits<double>::infinity();
          if (!(q < best_q)) break;
          best_q = q;
          best_b = sign * b;
        }
        if (best_b != 0.0) break;
      }
      if (best_b != 0.0) {
        next = (next + best_b * prev_step).cwiseMax(0.0);
        NormalizeSup(next);
      }
    }
    prev_step = next - x;
    x = std::move(next);
    energy = disc.Energy(x, p);
    mass = disc.Mass(x, p);
    const double new_q = energy / mass;
    last_decrease = (quotient - new_q) / quotient;
    quotient = new_q;
    stalled = last_decrease < cfg.tol ? stalled + 1 : 0;
    if (stalled >= cfg.stall_window) {
      if (refine_delta()) continue;
      converged = true;
      break;
    }
  }

  MaskedField u = mask.WithValues(disc.Scatter(x));
  const double lambda = RayleighQuotient(u, p);
  const double strong = StrongResidual(u, lambda, p);
  const double weak = WeakResidual(u, lambda, p);

  if (!converged || !(strong <= cfg.residual_tol * lambda)) {
    std::ostringstream msg;
    msg << "eigensolver did not converge: p=" << p << " iterations="
        << iterations << " lambda=" << lambda
        << " last_relative_decrease=" << last_decrease
        << " strong_residual/lambda=" << strong / lambda
        << " (limit " << cfg.residual_tol << ")";
    Fail(ErrorCode::kNotConverged, msg.str());
  }

  return EigenResult{.lambda = lambda,
                     .u = std::move(u),
                     .weak_residual = weak,
                     .strong_residual = strong,
                     .iterations = iterations,
                     .fallback_steps = fallback_steps,
                     .convergence_slack = 10.0 * cfg.tol * lambda};
}

namespace {

// Banded SPD matrix in lower storage: row r holds columns [r - bw, r].
class BandedCholesky {
 public:
  BandedCholesky(int n, int bw) : n_(n), bw_(bw), a_(static_cast<std::size_t>(n) * (bw + 1), 0.0) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (bw_ + 1) + (c - r + bw_)]; }
  double at(int r, int c) const {
    return a_[static_cast<std::size_t>(r) * (bw_ + 1) + (c - r + bw_)];
  }
  int bandwidth() const { return bw_; }

  void Factor() {
    for (int j = 0; j < n_; ++j) {
      const int k0 = std::max(0, j - bw_);
      double d = at(j, j);
      for (int k = k0; k < j; ++k) d -= at(j, k) * at(j, k);
      if (!(d > 0.0)) {
        Fail(ErrorCode::kInternal, "oracle stiffness matrix is not positive definite");
      }
      const double ljj = std::sqrt(d);
      at(j, j) = ljj;
      const int i1 = std::min(n_ - 1, j + bw_);
      for (int i = j + 1; i <= i1; ++i) {
        double s = at(i, j);
        const int kk = std::max(k0, i - bw_);
        for (int k = kk; k < j; ++k) s -= at(i, k) * at(j, k);
        at(i, j) = s / ljj;
      }
    }
  }

  void Solve(std::vector<double>& b) const {
    for (int i = 0; i < n_; ++i) {
      double s = b[i];
      for (int k = std::max(0, i - bw_); k < i; ++k) s -= at(i, k) * b[k];
      b[i] = s / at(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double s = b[i];
      const int k1 = std::min(n_ - 1, i + bw_);
      for (int k = i + 1; k <= k1; ++k) s -= at(k, i) * b[k];
      b[i] = s / at(i, i);
    }
  }

 private:
  int n_;
  int bw_;
  std::vector<double> a_;
};

struct Edge {
  int a;
  int b;
  double weight;
};

}  // namespace

OracleResult DenseOracleP2(const MaskedField& mask, double tol, int max_iter) {
  const Grid& g = mask.grid();
  std::vector<int> id(g.size(), -1);
  std::vector<double> mass;
  int n = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (mask.interior(i, j)) {
        id[g.Index(i, j)] = n++;
        mass.push_back(g.h * g.h * GaussianWeight(g.Node(i, j)));
      }
    }
  }
  if (static_cast<std::size_t>(n) > kOracleMaxUnknowns) {
    Fail(ErrorCode::kInvalidArgument, "oracle is limited to 20000 interior nodes");
  }

  // Edge weights: each cell carries w(center)/2 on each of its four edges.
  auto cell_weight = [&](int i, int j) {
    if (i < 0 || j < 0 || i + 1 >= g.nx || j + 1 >= g.ny) return 0.0;
    return 0.5 * GaussianWeight({g.origin.x + (i + 0.5) * g.h,
                                 g.origin.y + (j + 0.5) * g.h});
  };
  std::vector<Edge> edges;
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  int bw = 0;
  auto add_edge = [&](int ia, int ja, int ib, int jb, double w) {
    const int a = id[g.Index(ia, ja)];
    const int b = id[g.Index(ib, jb)];
    if (a < 0 && b < 0) return;
    if (a >= 0) diag[a] += w;
    if (b >= 0) diag[b] += w;
    if (a >= 0 && b >= 0) {
      edges.push_back({a, b, w});
      bw = std::max(bw, std::abs(a - b));
    }
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) add_edge(i, j, i + 1, j, cell_weight(i, j) + cell_weight(i, j - 1));
      if (j + 1 < g.ny) add_edge(i, j, i, j + 1, cell_weight(i, j) + cell_weight(i - 1, j));
    }
  }

  BandedCholesky chol(n, bw);
  for (int k = 0; k < n; ++k) chol.at(k, k) = diag[k];
  for (const Edge& e : edges) {
    const int r = std::max(e.a, e.b);
    const int c = std::min(e.a, e.b);
    chol.at(r, c) -= e.weight;
  }
  auto stiffness_times = [&](const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[k] = diag[k] * v[k];
    for (const Edge& e : edges) {
      out[e.a] -= e.weight * v[e.b];
      out[e.b] -= e.weight * v[e.a];
    }
    return out;
  };
  chol.Factor();

  std::vector<double> v(static_cast<std::size_t>(n), 1.0);
  double lambda = std::numeric_limits<double>::infinity();
  int it = 0;
  bool done = false;
  while (it < max_iter) {
    ++it;
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) y[k] = mass[k] * v[k];
    chol.Solve(y);
    const double s = *std::max_element(y.begin(), y.end());
    double change = 0.0;
    for (int k = 0; k < n; ++k) {
      y[k] /= s;
      change = std::max(change, std::abs(y[k] - v[k]));
    }
    v = std::move(y);
    const std::vector<double> kv = stiffness_times(v);
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < n; ++k) {
      num += v[k] * kv[k];
      den += mass[k] * v[k] * v[k];
    }
    const double next = num / den;
    const bool small_step = std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (small_step && change <= 1e-12) {
      done = true;
      break;
    }
  }
  if (!done) {
    Fail(ErrorCode::kNotConverged,
         "oracle inverse iteration hit the cap of " + std::to_string(max_iter));
  }

  std::vector<double> values(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int k = id[g.Index(i, j)];
      if (k >= 0) values[g.Index(i, j)] = std::max(0.0, v[k]);
    }
  }
  return OracleResult{.lambda = lambda,
                      .u = mask.WithValues(std::move(values)),
                      .iterations = it};
}

}  // namespace gpf
