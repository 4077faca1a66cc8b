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

// Inequality checks with quantified slack.
//
// Every check reduces to one scalar `slack` (positive means the inequality
// holds with margin) and a `tolerance`; the verdict is slack >= -tolerance
// and can always be recomputed from the report alone.

#ifndef GPF_VERIFY_HPP_
#define GPF_VERIFY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpf/convolution.hpp"
#include "gpf/eigensolver.hpp"
#include "gpf/field.hpp"
#include "gpf/geometry.hpp"

namespace gpf {

struct Report {
  std::string check;
  // Hex digests of the bodies involved, joined by '+'.
  std::string bodies;
  std::optional<double> p;
  std::optional<double> t;
  std::optional<double> h;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> values;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // Set when the check could not be carried out (for example a solver
  // failure). Such a report always fails and its slack is meaningless.
  std::string error;

  // Sets `pass`. Throws kInternal if any scalar is not finite.
  void Finalize();
  // True iff `pass` agrees with the scalars.
  bool Consistent() const;
  // Throws kInvalidArgument for an unknown key.
  double Value(std::string_view key) const;
};

Report FailedReport(std::string check, std::string bodies, std::string error);

// Pretty-printed JSON with a fixed key order.
std::string ReportJson(const Report& r);
Report ReportFromJson(std::string_view text);

// Summary ledger: check,bodies,p,t,h,slack,verdict
std::string SummaryCsvHeader();
std::string SummaryCsvRow(const Report& r);

std::string DigestHex(const ConvexBody& body);

struct Tolerances {
  double bm_relative = 1e-2;        // of lambda_t
  double urysohn_relative = 1e-2;   // of lambda of the matching ball
  double monotone_relative = 1e-8;  // of lambda of the outer body
  double oracle_relative = 1e-6;
  double semiconvexity = 1e-8;
  // Calibrated constants; the tolerances are c * h * rhs and c * h.
  double subsolution_c = 0.0;
  double logconcavity_c = 0.0;

  // Keys as above; missing keys keep their defaults, except the calibrated
  // constants, which are required. Throws kIo / kInvalidArgument.
  static Tolerances FromJson(std::string_view text);
  static Tolerances Load(const std::string& path);
};

// Records a solver result. With an oracle eigenvalue the slack is
// oracle_relative * oracle - |lambda - oracle|; otherwise it is 0.
Report SolveReport(const ConvexBody& body, double h, const SolverConfig& cfg,
                   const EigenResult& result,
                   std::optional<double> oracle_lambda, const Tolerances& tol);

// Full pipeline: solves all three bodies at spacing h.
Report CheckBm(const ConvexBody& k0, const ConvexBody& k1, double t, double h,
               const SolverConfig& cfg, const Tolerances& tol);

// From already computed eigenvalues at a common spacing h.
Report BmReport(const ConvexBody& k0, const ConvexBody& k1, double t, double h,
                double p, double lambda0, double lambda1, double lambda_t,
                const Tolerances& tol);

// slack = lambda_t - RQ(u_t), tolerance = subsolution_c * h * lambda_t.
// `t` and `bodies` only label the report.
Report CheckSubsolutionQuotient(const MaskedField& u_t, double lambda_t,
                                double p, const Tolerances& tol,
                                std::optional<double> t = {},
                                const std::string& bodies = "");

inline constexpr int kDefaultLogConcavitySamples = 1000;
inline constexpr std::uint64_t kDefaultSeed = 42;

// Midpoint test of ln u on seeded random node pairs from the positivity
// sub-mask (u > 1e-9 sup u). A pair counts when its points differ and the
// cell holding the midpoint has all corners in the sub-mask; ln u at the
// midpoint uses bilinear interpolation of u. Throws kDegenerate with fewer
// than 10 valid pairs.
Report CheckLogConcavity(const MaskedField& u, const Tolerances& tol,
                         int samples = kDefaultLogConcavitySamples,
                         std::uint64_t seed = kDefaultSeed);

// Two separated Gaussian bumps on the mask; not log-concave along the
// segment joining their centers.
MaskedField BimodalField(const MaskedField& mask);

inline constexpr int kDefaultBallVertices = 64;

Report CheckUrysohn(const ConvexBody& body, double h, const SolverConfig& cfg,
                    const Tolerances& tol,
                    int ball_vertices = kDefaultBallVertices);

// Throws kInvalidArgument unless inner is a subset of outer.
Report CheckDomainMonotonicity(const ConvexBody& inner, const ConvexBody& outer,
                               double h, const SolverConfig& cfg,
                               const Tolerances& tol);

// Reports supconv_domination, supconv_monotonicity, supconv_convergence,
// supconv_semiconvexity and supconv_fast_path for u over the given epsilons
// (at least two, any order). `bodies` labels the reports.
std::vector<Report> CheckSupConvolution(const MaskedField& u, double q,
                                        std::span<const double> epsilons,
                                        const Tolerances& tol,
                                        const std::string& bodies = "");

}  // namespace gpf

#endif  // GPF_VERIFY_HPP_
