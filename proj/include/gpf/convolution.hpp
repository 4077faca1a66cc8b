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

// Sup-convolution and the Minkowski sup-combination of sampled fields.
//
//   u_eps(x) = max_y  u(y) - |x - y|^q / (q eps^{q-1})
//   u_t(x)   = sup    u0(x0)^{1-t} u1(x1)^t   over x = (1-t) x0 + t x1
//
// Maxima range over interior nodes of the input mask. The brute-force loops
// are the reference semantics; every faster path evaluates the identical
// floating-point expression on a candidate subset that provably contains the
// maximizer, so results agree bit for bit.

#ifndef GPF_CONVOLUTION_HPP_
#define GPF_CONVOLUTION_HPP_

#include <iosfwd>
#include <optional>
#include <vector>

#include "gpf/field.hpp"

namespace gpf {

struct SupConvParams {
  double epsilon = 0.1;
  double q = 2.0;

  // q = max(2, p / (p - 1)).
  static SupConvParams ForExponent(double p, double epsilon);
  void Validate() const;

  // |d|^q / (q eps^{q-1}) from the squared distance.
  double Penalty(double dist2) const;
};

// O(N^2) over all interior node pairs.
MaskedField SupConvolution(const MaskedField& u, const SupConvParams& prm);

// Same values, scanning only nodes within the radius where the penalty can
// still beat the y = x candidate.
MaskedField SupConvolutionFast(const MaskedField& u, const SupConvParams& prm);

// (q eps^{q-1} osc u)^{1/q}: the maximizer of u_eps(x) lies within this
// distance of x.
double AttainmentRadius(const MaskedField& u, const SupConvParams& prm);

// max |u(a) - u(b)| / |a - b| over interior node pairs.
double LipschitzConstant(const MaskedField& u);

// (q - 1) / eps * L^{(q-2)/(q-1)}.
double SemiconvexityConstant(const SupConvParams& prm, double lipschitz);

struct SemiconvexityResult {
  // min of the centered second difference quotient of u + c |x|^2 along the
  // axis and diagonal directions; +infinity when nothing was checked.
  double defect = 0.0;
  std::size_t nodes_checked = 0;
};

// Only nodes farther than `margin` from every non-interior node, whose
// stencil neighbours are interior, take part.
SemiconvexityResult SemiconvexityDefect(const MaskedField& u, double c,
                                        double margin = 0.0);

enum class CombinationMode {
  // One factor ranges over interior nodes, the other is bilinearly
  // interpolated at the exact preimage. The enumerated side is the one whose
  // preimage map contracts: nodes of u1 for t <= 1/2, of u0 otherwise.
  kInterpolated,
  // Node pairs (x0, x1) whose combination lands within the snap radius of x.
  kNodePairs,
};

struct CombinationParams {
  double t = 0.5;
  CombinationMode mode = CombinationMode::kInterpolated;
  // Node-pair mode only; negative selects h / 2.
  double snap_radius = -1.0;

  void Validate() const;
};

struct OptimalPair {
  Point x;
  Point x0;
  Point x1;
  double value = 0.0;
};

struct CombinationResult {
  MaskedField u;
  // One entry per interior target node with a positive value, node order.
  std::vector<OptimalPair> pairs;
  // Interior target nodes with no admissible candidate (left at 0).
  std::size_t empty_nodes = 0;
};

// u0, u1 nonnegative. `target` supplies the grid and mask of the combined
// domain; all three grids must share the spacing h. 0^{1-t} v^t is 0 for
// t < 1, and v^0 is 1.
CombinationResult SupCombination(const MaskedField& u0, const MaskedField& u1,
                                 const MaskedField& target,
                                 const CombinationParams& prm);

// |grad u0(x0) / u0(x0) - grad u1(x1) / u1(x1)| with central-difference
// gradients interpolated at the pair. Empty when either point has a stencil
// cell touching a non-interior node or a value at or below `threshold`.
std::optional<double> ArgmaxPairCheck(const MaskedField& u0,
                                      const MaskedField& u1,
                                      const OptimalPair& pair,
                                      double threshold = 1e-6);

// CSV with header "x,y,x0,y0,x1,y1,value".
void WritePairTrace(const std::vector<OptimalPair>& pairs, std::ostream& out);

}  // namespace gpf

#endif  // GPF_CONVOLUTION_HPP_
