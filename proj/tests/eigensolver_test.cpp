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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gpf/eigensolver.hpp"
#include "gpf/error.hpp"
#include "oracles.hpp"

namespace gpf {
namespace {

testing_oracles::Sampled ToSampled(const MaskedField& u) {
  const Grid& g = u.grid();
  testing_oracles::Sampled s;
  s.x0 = g.origin.x;
  s.y0 = g.origin.y;
  s.h = g.h;
  s.nx = g.nx;
  s.ny = g.ny;
  s.mask.assign(u.mask().begin(), u.mask().end());
  s.u.assign(u.values().begin(), u.values().end());
  return s;
}

SolverConfig Config(double p, Initialization init = Initialization::kDistance) {
  SolverConfig cfg;
  cfg.p = p;
  cfg.init = init;
  return cfg;
}

// A(u)_n equals (1/p) dE/du_n / (h^2 w(x_n)) for the cell energy E.
TEST(ApplyOperator, MatchesDerivativeOfOracleEnergy) {
  const ConvexBody k = RegularPolygon(6, 1.0, {0.1, 0.0});
  const MaskedField mask = Rasterize(k, Grid::Covering(k, 0.125));
  const Grid& g = mask.grid();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.1, 1.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = U(rng);
  const MaskedField u = mask.WithValues(v);

  for (auto [p, delta] : {std::pair{3.0, 0.0}, std::pair{2.0, 0.0}, std::pair{1.5, 1e-2}}) {
    const std::vector<double> a = ApplyOperator(u, p, delta);
    auto s = ToSampled(u);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const size_t n = g.Index(i, j);
        if (!u.interior(i, j)) {
          EXPECT_EQ(a[n], 0.0);
          continue;
        }
        const double step = 1e-6;
        const double keep = s.u[n];
        s.u[n] = keep + step;
        const double ep = testing_oracles::CellEnergy(s, p, delta);
        s.u[n] = keep - step;
        const double em = testing_oracles::CellEnergy(s, p, delta);
        s.u[n] = keep;
        const double mass = g.h * g.h * GaussianWeight(g.Node(i, j));
        const double expected = (ep - em) / (2 * step) / p / mass;
        EXPECT_NEAR(a[n], expected, 1e-5 * (1 + std::abs(expected))) << "p " << p;
      }
    }
  }
}

TEST(Solver, AgreesWithDenseOracleAtP2) {
  for (const ConvexBody& k : {Rectangle(-1, 1, -1, 1), RegularPolygon(64, 1.0)}) {
    const MaskedField mask = Rasterize(k, Grid::Covering(k, 1.0 / 16));
    const EigenResult r = SolvePrincipal(mask, Config(2.0));
    const OracleResult o = DenseOracleP2(mask);
    EXPECT_NEAR(r.lambda, o.lambda, 1e-6 * o.lambda);
  }
}

// Far from the origin the truncation is invisible: on a half plane the first
// eigenfunction is x with eigenvalue 1, on a quadrant xy with eigenvalue 2.
TEST(Solver, HalfPlaneAndQuadrantEigenvalues) {
  const double h = 0.125;
  const MaskedField half = Rasterize(Rectangle(0, 6, -6, 6),
                                     Grid::Covering(Rectangle(0, 6, -6, 6), h));
  const MaskedField quad = Rasterize(Rectangle(0, 6, 0, 6),
                                     Grid::Covering(Rectangle(0, 6, 0, 6), h));
  EXPECT_NEAR(DenseOracleP2(half).lambda, 1.0, 1e-2);
  EXPECT_NEAR(SolvePrincipal(half, Config(2.0)).lambda, 1.0, 1e-2);
  EXPECT_NEAR(DenseOracleP2(quad).lambda, 2.0, 2e-2);
}

TEST(Solver, EigenfunctionIsNonnegativeAndSupNormalized) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    const EigenResult r = SolvePrincipal(k, Grid::Covering(k, 1.0 / 16), Config(p));
    EXPECT_NEAR(r.u.Sup(), 1.0, 1e-12);
    EXPECT_GE(r.u.Inf(), 0.0);
    EXPECT_GT(r.lambda, 0.0);
    EXPECT_LE(r.strong_residual, SolverConfig{}.residual_tol * r.lambda);
    EXPECT_GE(r.convergence_slack, 0.0);
    EXPECT_NEAR(RayleighQuotient(r.u, p), r.lambda, 1e-12 * r.lambda);
  }
}

TEST(Solver, InitializationDoesNotChangeTheEigenvalue) {
  const ConvexBody k = RegularPolygon(5, 1.0);
  for (double p : {1.5, 3.0}) {
    const Grid g = Grid::Covering(k, 1.0 / 16);
    const double a = SolvePrincipal(k, g, Config(p, Initialization::kDistance)).lambda;
    const double b = SolvePrincipal(k, g, Config(p, Initialization::kRandom)).lambda;
    const double c = SolvePrincipal(k, g, Config(p, Initialization::kOracle)).lambda;
    EXPECT_NEAR(a, b, 1e-6 * a) << "p " << p;
    EXPECT_NEAR(a, c, 1e-6 * a) << "p " << p;
  }
}

TEST(Solver, SmallerDomainHasLargerEigenvalue) {
  const ConvexBody outer = Rectangle(-1, 1, -1, 1);
  const ConvexBody inner = Rectangle(-0.8, 0.9, -1, 0.7);
  for (double p : {1.5, 3.0}) {
    const double lo = SolvePrincipal(outer, Grid::Covering(outer, 1.0 / 16), Config(p)).lambda;
    const double hi = SolvePrincipal(inner, Grid::Covering(inner, 1.0 / 16), Config(p)).lambda;
    EXPECT_GT(hi, lo);
  }
}

TEST(Solver, IterationCapRaisesNotConverged) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  SolverConfig cfg = Config(3.0, Initialization::kRandom);
  cfg.max_iter = 2;
  try {
    SolvePrincipal(k, Grid::Covering(k, 1.0 / 16), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotConverged);
  }
}

TEST(SolverConfig, ValidatesFields) {
  SolverConfig cfg;
  cfg.p = 1.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = SolverConfig{};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = SolverConfig{};
  cfg.stall_window = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = SolverConfig{};
  cfg.p = 1.5;
  EXPECT_DOUBLE_EQ(cfg.EffectiveDelta(), 1e-8);
  cfg.p = 3.0;
  EXPECT_DOUBLE_EQ(cfg.EffectiveDelta(), 0.0);
}

TEST(Residuals, VanishForTheOracleEigenpair) {
  const ConvexBody k = RegularPolygon(64, 1.0);
  const OracleResult o = DenseOracleP2(Rasterize(k, Grid::Covering(k, 1.0 / 16)));
  EXPECT_LT(StrongResidual(o.u, o.lambda, 2.0), 1e-8 * o.lambda);
  EXPECT_LT(WeakResidual(o.u, o.lambda, 2.0), 1e-10);
  EXPECT_GT(StrongResidual(o.u, 1.1 * o.lambda, 2.0), 1e-3);
}

TEST(DistanceToBoundary, IsPositiveInsideAndZeroOutside) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  const MaskedField mask = Rasterize(k, Grid::Covering(k, 0.25));
  const MaskedField d = DistanceToBoundary(mask);
  const Grid& g = d.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (mask.interior(i, j)) {
        EXPECT_GT(d.at(i, j), 0.0);
      } else {
        EXPECT_EQ(d.at(i, j), 0.0);
      }
    }
  }
  EXPECT_NEAR(d.Sup(), 1.0, 1e-12);
}

}  // namespace
}  // namespace gpf
