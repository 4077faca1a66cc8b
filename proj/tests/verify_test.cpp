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
#include <limits>
#include <random>

#include "gpf/error.hpp"
#include "gpf/verify.hpp"

namespace gpf {
namespace {

Tolerances Calibrated() { return Tolerances::Load(GPF_TOLERANCES_PATH); }

SolverConfig Config(double p) {
  SolverConfig cfg;
  cfg.p = p;
  return cfg;
}

Report Sample() {
  Report r;
  r.check = "bm";
  r.bodies = "0123456789abcdef+fedcba9876543210";
  r.p = 1.5;
  r.t = 0.25;
  r.h = 1.0 / 64;
  r.inputs = {{"delta", 1e-8}, {"tol", 1e-10}};
  r.values = {{"lambda_0", 4.0 / 3.0}, {"lambda_t", 0.1 + 0.2}};
  r.slack = -1e-300;
  r.tolerance = 3e-3;
  r.Finalize();
  return r;
}

TEST(Report, JsonRoundTripIsExact) {
  const Report r = Sample();
  const Report back = ReportFromJson(ReportJson(r));
  EXPECT_EQ(back.check, r.check);
  EXPECT_EQ(back.bodies, r.bodies);
  EXPECT_EQ(back.p, r.p);
  EXPECT_EQ(back.t, r.t);
  EXPECT_EQ(back.h, r.h);
  EXPECT_EQ(back.inputs, r.inputs);
  EXPECT_EQ(back.values, r.values);
  EXPECT_EQ(back.slack, r.slack);
  EXPECT_EQ(back.tolerance, r.tolerance);
  EXPECT_EQ(back.pass, r.pass);
  EXPECT_EQ(ReportJson(back), ReportJson(r));
}

TEST(Report, VerdictFollowsSlackAndTolerance) {
  Report r = Sample();
  EXPECT_TRUE(r.pass);
  r.slack = -3e-3;
  r.Finalize();
  EXPECT_TRUE(r.pass);
  r.slack = -3.0001e-3;
  r.Finalize();
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.Consistent());
  r.pass = true;
  EXPECT_FALSE(r.Consistent());
}

TEST(Report, NonFiniteScalarsAreRejected) {
  Report r = Sample();
  r.values.emplace_back("bad", std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(r.Finalize(), Error);
}

TEST(Report, FailedReportNeverPasses) {
  const Report r = FailedReport("urysohn", "abc", "not converged");
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.Consistent());
  const std::string j = ReportJson(r);
  EXPECT_NE(j.find("\"error\": \"not converged\""), std::string::npos);
  EXPECT_EQ(j.find("\"slack\""), std::string::npos);
  EXPECT_EQ(ReportFromJson(j).error, "not converged");
}

TEST(Report, ValueLookup) {
  const Report r = Sample();
  EXPECT_DOUBLE_EQ(r.Value("lambda_0"), 4.0 / 3.0);
  EXPECT_THROW(r.Value("missing"), Error);
}

TEST(Summary, CsvRow) {
  EXPECT_EQ(SummaryCsvHeader(), "check,bodies,p,t,h,slack,verdict\n");
  Report r = Sample();
  r.slack = 0.5;
  r.Finalize();
  EXPECT_EQ(SummaryCsvRow(r),
            "bm,0123456789abcdef+fedcba9876543210,1.5,0.25,0.015625,0.5,pass\n");
}

TEST(Digest, SixteenHexDigits) {
  const std::string d = DigestHex(Rectangle(-1, 1, -1, 1));
  EXPECT_EQ(d.size(), 16u);
  EXPECT_EQ(d.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(Tolerances, CalibratedConstantsAreRequired) {
  EXPECT_THROW(Tolerances::FromJson(R"({"bm_relative": 0.01})"), Error);
  const Tolerances t =
      Tolerances::FromJson(R"({"subsolution_c": 0.5, "logconcavity_c": 0.25})");
  EXPECT_DOUBLE_EQ(t.subsolution_c, 0.5);
  EXPECT_DOUBLE_EQ(t.bm_relative, 1e-2);
  try {
    Tolerances::Load("/nonexistent/tolerances.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  const Tolerances c = Calibrated();
  EXPECT_GT(c.subsolution_c, 0.0);
  EXPECT_GT(c.logconcavity_c, 0.0);
}

TEST(BmReport, SlackIsRightMinusLeft) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  const Report r = BmReport(k, k, 0.25, 0.1, 2.0, 4.0, 8.0, 4.5, Calibrated());
  EXPECT_DOUBLE_EQ(r.slack, 0.75 * 4.0 + 0.25 * 8.0 - 4.5);
  EXPECT_DOUBLE_EQ(r.tolerance, 1e-2 * 4.5);
  EXPECT_TRUE(r.pass);
  const Report bad = BmReport(k, k, 0.5, 0.1, 2.0, 4.0, 4.0, 4.5, Calibrated());
  EXPECT_FALSE(bad.pass);
}

TEST(CheckBm, EqualBodiesHaveZeroSlack) {
  const ConvexBody k = RegularPolygon(64, 1.0);
  const Report r = CheckBm(k, k, 0.5, 1.0 / 16, Config(2.0), Calibrated());
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.slack, 0.0, 1e-9 * r.Value("lambda_t"));
}

TEST(CheckSubsolution, CombinationPassesAndSpikeFails) {
  const ConvexBody k0 = Rectangle(-1, 1, -1, 1);
  const ConvexBody k1 = RegularPolygon(64, 1.0);
  const double h = 1.0 / 16;
  const EigenResult r0 = SolvePrincipal(k0, Grid::Covering(k0, h), Config(2.0));
  const EigenResult r1 = SolvePrincipal(k1, Grid::Covering(k1, h), Config(2.0));
  const ConvexBody kt = MinkowskiCombination(k0, k1, 0.5);
  const MaskedField target = Rasterize(kt, Grid::Covering(kt, h));
  const CombinationResult comb = SupCombination(r0.u, r1.u, target, {.t = 0.5});
  const double rhs = 0.5 * (r0.lambda + r1.lambda);
  const Tolerances tol = Calibrated();
  EXPECT_TRUE(CheckSubsolutionQuotient(comb.u, rhs, 2.0, tol).pass);

  std::vector<double> v(comb.u.values().begin(), comb.u.values().end());
  const Grid& g = comb.u.grid();
  v[g.Index(g.nx / 2 + 3, g.ny / 2 - 2)] += 2.0;
  const Report spiked = CheckSubsolutionQuotient(comb.u.WithValues(v), rhs, 2.0, tol);
  EXPECT_FALSE(spiked.pass);
  EXPECT_LT(spiked.slack, -spiked.tolerance);
}

TEST(CheckLogConcavity, EigenfunctionPassesBimodalFails) {
  const ConvexBody k = RegularPolygon(64, 1.0);
  const EigenResult r = SolvePrincipal(k, Grid::Covering(k, 1.0 / 16), Config(3.0));
  const Tolerances tol = Calibrated();
  const Report good = CheckLogConcavity(r.u, tol);
  EXPECT_TRUE(good.pass) << ReportJson(good);
  const Report bad = CheckLogConcavity(BimodalField(r.u), tol);
  EXPECT_FALSE(bad.pass) << ReportJson(bad);
}

TEST(CheckLogConcavity, SeedMakesItDeterministic) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  const EigenResult r = SolvePrincipal(k, Grid::Covering(k, 1.0 / 16), Config(2.0));
  const Tolerances tol = Calibrated();
  EXPECT_EQ(ReportJson(CheckLogConcavity(r.u, tol, 500, 7)),
            ReportJson(CheckLogConcavity(r.u, tol, 500, 7)));
  EXPECT_THROW(CheckLogConcavity(r.u, tol, 5), Error);
}

TEST(CheckUrysohn, RectanglePasses) {
  const Report r = CheckUrysohn(Rectangle(-2, 2, -0.25, 0.25), 1.0 / 16, Config(2.0),
                                Calibrated());
  EXPECT_TRUE(r.pass) << ReportJson(r);
  EXPECT_NEAR(r.Value("mean_width"), r.Value("mean_width_ball"), 1e-6);
}

TEST(CheckDomainMonotonicity, RequiresNesting) {
  const ConvexBody outer = Rectangle(-1, 1, -1, 1);
  const ConvexBody inner = RegularPolygon(64, 0.9);
  const Report r = CheckDomainMonotonicity(inner, outer, 1.0 / 16, Config(2.0), Calibrated());
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.slack, 0.0);
  EXPECT_THROW(CheckDomainMonotonicity(outer, inner, 1.0 / 16, Config(2.0), Calibrated()),
               Error);
}

TEST(CheckSupConvolution, AllPropertiesHoldOnRandomField) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  const MaskedField mask = Rasterize(k, Grid::Covering(k, 1.0 / 16));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(mask.grid().size());
  for (double& x : v) x = U(rng);
  const double eps[] = {1e-1, 1e-2, 1e-3};
  for (double q : {2.0, 3.0}) {
    const std::vector<Report> rs =
        CheckSupConvolution(mask.WithValues(v), q, eps, Calibrated(), "random");
    ASSERT_EQ(rs.size(), 5u);
    EXPECT_EQ(rs[0].check, "supconv_domination");
    EXPECT_EQ(rs[4].check, "supconv_fast_path");
    for (const Report& r : rs) EXPECT_TRUE(r.pass) << ReportJson(r);
  }
}

TEST(CheckSupConvolution, NeedsTwoEpsilons) {
  const ConvexBody k = Rectangle(-1, 1, -1, 1);
  const MaskedField mask = Rasterize(k, Grid::Covering(k, 0.25));
  const double eps[] = {0.1};
  EXPECT_THROW(CheckSupConvolution(mask, 2.0, eps, Calibrated()), Error);
}

}  // namespace
}  // namespace gpf
