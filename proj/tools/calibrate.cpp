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

// Refinement study behind the h-dependent tolerances.
//
// For the square and the 64-gon disk, p in {1.5, 2, 3} and h in
// {1/16, 1/32, 1/64} it measures
//   - the sup-combination quotient excess max(0, RQ(u_t) - rhs) / (h rhs)
//     for (disk, disk) and (square, disk) at t = 1/2,
//   - the log-concavity midpoint defect max(0, -defect) / h,
// and writes twice the largest ratio, rounded up to one significant digit,
// as subsolution_c and logconcavity_c.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gpf/convolution.hpp"
#include "gpf/eigensolver.hpp"
#include "gpf/verify.hpp"
#include "json.hpp"

namespace {

double RoundUpOneDigit(double x) {
  if (!(x > 0.0)) return 0.0;
  const double scale = std::pow(10.0, std::floor(std::log10(x)));
  return std::ceil(x / scale) * scale;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Refinement study for the calibrated tolerances"};
  std::string out_path = "tolerances.json";
  double safety = 2.0;
  app.add_option("-o,--output", out_path, "tolerances file to write");
  app.add_option("--safety", safety, "factor applied to the largest ratio");
  CLI11_PARSE(app, argc, argv);

  using gpf::ConvexBody;
  const ConvexBody square = gpf::Rectangle(-1, 1, -1, 1);
  const ConvexBody disk = gpf::RegularPolygon(64, 1.0);
  const double ps[] = {1.5, 2.0, 3.0};
  const double hs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};

  gpf::Tolerances zero;  // c = 0: slack is the raw measurement
  nlohmann::ordered_json study = nlohmann::ordered_json::array();
  double sub_ratio = 0.0;
  double logc_ratio = 0.0;

  for (double p : ps) {
    gpf::SolverConfig cfg;
    cfg.p = p;
    for (double h : hs) {
      const gpf::EigenResult rs =
          gpf::SolvePrincipal(square, gpf::Grid::Covering(square, h), cfg);
      const gpf::EigenResult rd =
          gpf::SolvePrincipal(disk, gpf::Grid::Covering(disk, h), cfg);

      struct Pair {
        const char* name;
        const gpf::EigenResult* a;
        const gpf::EigenResult* b;
        const ConvexBody* ka;
        const ConvexBody* kb;
      };
      for (const Pair& pr : {Pair{"disk+disk", &rd, &rd, &disk, &disk},
                             Pair{"square+disk", &rs, &rd, &square, &disk}}) {
        const ConvexBody kt = gpf::MinkowskiCombination(*pr.ka, *pr.kb, 0.5);
        const gpf::MaskedField target =
            gpf::Rasterize(kt, gpf::Grid::Covering(kt, h));
        const gpf::CombinationResult comb =
            gpf::SupCombination(pr.a->u, pr.b->u, target, {.t = 0.5});
        const double rhs = 0.5 * (pr.a->lambda + pr.b->lambda);
        const gpf::Report r = gpf::CheckSubsolutionQuotient(comb.u, rhs, p, zero);
        const double ratio = std::max(0.0, -r.slack) / (h * rhs);
        sub_ratio = std::max(sub_ratio, ratio);
        study.push_back({{"study", "subsolution"},
                         {"bodies", pr.name},
                         {"p", p},
                         {"h", h},
                         {"excess", -r.slack},
                         {"ratio", ratio}});
        std::cerr << "subsolution " << pr.name << " p=" << p << " h=" << h
                  << " excess=" << -r.slack << "\n";
      }
      for (const auto& [name, res] :
           {std::pair{"square", &rs}, std::pair{"disk", &rd}}) {
        const gpf::Report r = gpf::CheckLogConcavity(res->u, zero);
        const double ratio = std::max(0.0, -r.slack) / h;
        logc_ratio = std::max(logc_ratio, ratio);
        study.push_back({{"study", "logconcavity"},
                         {"bodies", name},
                         {"p", p},
                         {"h", h},
                         {"defect", r.slack},
                         {"ratio", ratio}});
        std::cerr << "logconcavity " << name << " p=" << p << " h=" << h
                  << " defect=" << r.slack << "\n";
      }
    }
  }

  const gpf::Tolerances defaults;
  nlohmann::ordered_json out;
  out["bm_relative"] = defaults.bm_relative;
  out["urysohn_relative"] = defaults.urysohn_relative;
  out["monotone_relative"] = defaults.monotone_relative;
  out["oracle_relative"] = defaults.oracle_relative;
  out["semiconvexity"] = defaults.semiconvexity;
  out["subsolution_c"] = RoundUpOneDigit(safety * sub_ratio);
  out["logconcavity_c"] = RoundUpOneDigit(safety * logc_ratio);
  out["calibration"] = {{"safety", safety},
                        {"max_subsolution_ratio", sub_ratio},
                        {"max_logconcavity_ratio", logc_ratio},
                        {"runs", study}};
  std::ofstream f(out_path);
  if (!f) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  f << out.dump(2) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}
