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

// Principal frequency of the Gaussian p-Laplacian
//
//   -div(|grad u|^{p-2} grad u) + (x, grad u) |grad u|^{p-2} = lambda u^{p-1}
//
// with u = 0 on the boundary, computed as the minimum of the discrete
// weighted Rayleigh quotient (see field.hpp for the quadratures).

#ifndef GPF_EIGENSOLVER_HPP_
#define GPF_EIGENSOLVER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "gpf/field.hpp"
#include "gpf/geometry.hpp"

namespace gpf {

enum class Initialization {
  kOracle,    // p = 2 eigenvector when the oracle is feasible, else distance
  kDistance,  // distance to the nearest exterior node
  kRandom,    // uniform [0, 1) on interior nodes, seeded
};

inline constexpr std::size_t kOracleMaxUnknowns = 20000;

struct SolverConfig {
  double p = 2.0;
  // Regularization of the frozen linearized operator. Negative selects the
  // default: 1e-8 for p < 2 and 0 for p >= 2.
  double delta = -1.0;
  // Stop when the relative quotient decrease stays below `tol` for
  // `stall_window` consecutive iterations.
  double tol = 1e-10;
  int stall_window = 5;
  int max_iter = 50000;
  // Relative residual accepted for the linear solves (iterative refinement)
  // and the p = 2 oracle's eigenvalue increment.
  double inner_tol = 1e-12;
  // Upper bound on strong_residual / lambda for a converged result.
  double residual_tol = 1e-4;
  Initialization init = Initialization::kOracle;
  std::uint64_t seed = 42;

  double EffectiveDelta() const;
  void Validate() const;
};

struct EigenResult {
  double lambda = 0.0;
  MaskedField u;  // nonnegative, sup u = 1
  double weak_residual = 0.0;
  double strong_residual = 0.0;
  int iterations = 0;
  int fallback_steps = 0;
  // Bound on lambda minus the discrete minimum implied by the stopping rule.
  double convergence_slack = 0.0;
};

// -div((|g|^2+delta)^{(p-2)/2} g) + (x, g)(|g|^2+delta)^{(p-2)/2} in flux
// form: the gradient of the delta-regularized cell energy divided by the
// nodal mass h^2 w(x_n). Zero off the mask.
std::vector<double> ApplyOperator(const MaskedField& u, double p, double delta);

// max_n |<flux, grad phi_n>_gamma - lambda <|u|^{p-2} u, phi_n>_gamma| over
// interior nodes n, phi_n the nodal hat function (lumped mass).
double WeakResidual(const MaskedField& u, double lambda, double p);

// max_n |A(u)_n - lambda |u_n|^{p-2} u_n| over interior nodes.
double StrongResidual(const MaskedField& u, double lambda, double p);

// Throws Error(kNotConverged) when the iteration cap is hit or the final
// residual exceeds cfg.residual_tol * lambda.
EigenResult SolvePrincipal(const ConvexBody& body, const Grid& grid,
                           const SolverConfig& cfg);
// Same on an explicit mask; `initial` overrides cfg.init when given.
EigenResult SolvePrincipal(const MaskedField& mask, const SolverConfig& cfg,
                           const std::optional<MaskedField>& initial = {});

struct OracleResult {
  double lambda = 0.0;
  MaskedField u;  // nonnegative, sup u = 1
  int iterations = 0;
};

// Smallest eigenvalue of the weighted 5-point stiffness / lumped mass pencil
// at p = 2, by inverse power iteration from the all-ones vector with a banded
// Cholesky factorization. Values of `mask` are ignored.
OracleResult DenseOracleP2(const MaskedField& mask, double tol = 1e-14,
                           int max_iter = 5000);

// Chamfer distance (in units of length) to the nearest non-interior node.
MaskedField DistanceToBoundary(const MaskedField& mask);

}  // namespace gpf

#endif  // GPF_EIGENSOLVER_HPP_
