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

// Acceptance suite. Prints detail lines while running and one
// "criterion N: PASS|FAIL" line per criterion at the end. Exit status is 0
// iff every selected criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Sparse>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "gpf/convolution.hpp"
#include "gpf/eigensolver.hpp"
#include "gpf/error.hpp"
#include "gpf/field.hpp"
#include "gpf/geometry.hpp"
#include "gpf/verify.hpp"
#include "json.hpp"
#include "../oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gpf;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

void Detail(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  std::printf("  ");
  std::vprintf(fmt, args);
  std::printf("\n");
  std::fflush(stdout);
  va_end(args);
}

std::string Format(const char* fmt, ...) {
  char buf[512];
  std::va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string summary;
};

ConvexBody Square() { return Rectangle(-1, 1, -1, 1); }
ConvexBody Disk() { return RegularPolygon(64, 1.0); }
ConvexBody Triangle() { return ConvexBody::FromVertices({{-1, -1}, {1, -1}, {-1, 1}}); }
ConvexBody Rounded() { return MinkowskiCombination(Triangle(), Square(), 0.5); }
ConvexBody Slab() { return Rectangle(-2, 2, -0.25, 0.25); }

constexpr double kPs[] = {1.5, 2.0, 3.0};
constexpr double kTs[] = {0.25, 0.5, 0.75};
constexpr double kHs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};

// Smallest eigenvalue of the p = 2 discrete pencil, assembled edge by edge
// from the cell quadrature and solved with a sparse LDL^T factorization.
double ReferenceLambdaP2(const MaskedField& mask) {
  const Grid& g = mask.grid();
  std::vector<int> id(g.size(), -1);
  int n = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (mask.interior(i, j)) id[g.Index(i, j)] = n++;
    }
  }
  auto node = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return -1;
    return id[g.Index(i, j)];
  };
  // Each cell adds w(center) / 2 * (u_a - u_b)^2 for each of its edges.
  std::vector<Eigen::Triplet<double>> trip;
  auto edge = [&](int a, int b, double w) {
    if (a >= 0) trip.emplace_back(a, a, w);
    if (b >= 0) trip.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -w);
      trip.emplace_back(b, a, -w);
    }
  };
  for (int j = -1; j < g.ny; ++j) {
    for (int i = -1; i < g.nx; ++i) {
      const int a = node(i, j), b = node(i + 1, j);
      const int c = node(i, j + 1), d = node(i + 1, j + 1);
      if (a < 0 && b < 0 && c < 0 && d < 0) continue;
      const double w = testing_oracles::Gauss(g.origin.x + (i + 0.5) * g.h,
                                              g.origin.y + (j + 0.5) * g.h) / 2;
      edge(a, b, w);
      edge(c, d, w);
      edge(a, c, w);
      edge(b, d, w);
    }
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd m(n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int a = node(i, j);
      if (a >= 0) m[a] = g.h * g.h * testing_oracles::Gauss(g.origin.x + i * g.h, g.origin.y + j * g.h);
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
  if (ldlt.info() != Eigen::Success) return std::nan("");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd y = ldlt.solve(m.cwiseProduct(x));
    y /= y.cwiseAbs().maxCoeff();
    const double next = y.dot(k * y) / y.dot(m.cwiseProduct(y));
    x = std::move(y);
    if (std::abs(next - lambda) <= 1e-15 * next) return next;
    lambda = next;
  }
  return lambda;
}

class Suite {
 public:
  Suite(Tolerances tol, std::string cli) : tol_(tol), cli_(std::move(cli)) {}

  Outcome OracleAgreement();
  Outcome SelfConvergence();
  Outcome BrunnMinkowski();
  Outcome Subsolution();
  Outcome LogConcavity();
  Outcome Urysohn();
  Outcome SupConvolutionSuite();
  Outcome Geometry();
  Outcome Invariants();

 private:
  // Cached principal pairs with the default solver configuration.
  const EigenResult& Principal(const ConvexBody& k, double p, double h) {
    const auto key = std::make_tuple(Digest(k), p, h);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      SolverConfig cfg;
      cfg.p = p;
      it = cache_.emplace(key, SolvePrincipal(k, Grid::Covering(k, h), cfg)).first;
    }
    return it->second;
  }

  bool CliDeterministic(const json& config, const fs::path& dir, std::string* why);

  Tolerances tol_;
  std::string cli_;
  std::map<std::tuple<std::uint64_t, double, double>, EigenResult> cache_;
};

Outcome Suite::OracleAgreement() {
  Outcome out;
  double worst = 0.0, slowest = 0.0;
  const std::pair<const char*, ConvexBody> bodies[] = {{"square", Square()}, {"disk", Disk()}};
  for (const auto& [name, k] : bodies) {
    const MaskedField mask = Rasterize(k, Grid::Covering(k, 1.0 / 32));
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.init = Initialization::kDistance;
    const auto t0 = Clock::now();
    const EigenResult solved = SolvePrincipal(mask, cfg);
    const double solve_s = Seconds(t0);
    const auto t1 = Clock::now();
    const OracleResult oracle = DenseOracleP2(mask);
    const double oracle_s = Seconds(t1);
    const double reference = ReferenceLambdaP2(mask);
    const double rel = std::abs(solved.lambda - oracle.lambda) / oracle.lambda;
    const double ref_rel = std::abs(oracle.lambda - reference) / reference;
    const bool ok = rel <= tol_.oracle_relative && ref_rel <= 1e-9 && solve_s <= 60.0 &&
                    oracle_s <= 60.0;
    Detail("%-6s solver %.12f oracle %.12f reference %.12f rel %.2e ref_rel %.2e "
           "solve %.2fs oracle %.2fs %s",
           name, solved.lambda, oracle.lambda, reference, rel, ref_rel, solve_s, oracle_s,
           ok ? "ok" : "FAIL");
    out.pass &= ok;
    worst = std::max(worst, rel);
    slowest = std::max({slowest, solve_s, oracle_s});
  }
  out.summary = Format("max relative difference %.2e (limit %.0e), slowest run %.2fs", worst,
                       tol_.oracle_relative, slowest);
  return out;
}

Outcome Suite::SelfConvergence() {
  Outcome out;
  const auto t0 = Clock::now();
  double min_ratio = 1e300;
  for (double p : kPs) {
    double lam[3];
    for (int i = 0; i < 3; ++i) lam[i] = Principal(Square(), p, kHs[i]).lambda;
    const double d1 = std::abs(lam[0] - lam[1]), d2 = std::abs(lam[1] - lam[2]);
    const double ratio = d2 > 0 ? d1 / d2 : (d1 > 0 ? 1e300 : 0.0);
    Detail("p=%.1f lambda %.10f %.10f %.10f  diffs %.3e %.3e  ratio %.3f %s", p, lam[0],
           lam[1], lam[2], d1, d2, ratio, ratio >= 2.0 ? "ok" : "FAIL");
    out.pass &= ratio >= 2.0;
    min_ratio = std::min(min_ratio, ratio);
  }
  const double total = Seconds(t0);
  out.pass &= total <= 600.0;
  out.summary = Format("min ratio %.3f (limit 2), %.1fs (limit 600s)", min_ratio, total);
  return out;
}

Outcome Suite::BrunnMinkowski() {
  Outcome out;
  const auto t0 = Clock::now();
  const double h = 1.0 / 64;
  const std::tuple<const char*, ConvexBody, ConvexBody> pairs[] = {
      {"square+disk", Square(), Disk()}, {"square+rounded", Square(), Rounded()}};
  double worst = 1e300;
  int count = 0;
  for (const auto& [name, k0, k1] : pairs) {
    for (double p : kPs) {
      const double l0 = Principal(k0, p, h).lambda;
      const double l1 = Principal(k1, p, h).lambda;
      for (double t : kTs) {
        const ConvexBody kt = MinkowskiCombination(k0, k1, t);
        const double lt = Principal(kt, p, h).lambda;
        const Report r = BmReport(k0, k1, t, h, p, l0, l1, lt, tol_);
        Detail("%-15s p=%.1f t=%.2f lambda0 %.8f lambda1 %.8f lambda_t %.8f slack %+.4e %s",
               name, p, t, l0, l1, lt, r.slack, r.pass ? "ok" : "FAIL");
        out.pass &= r.pass;
        worst = std::min(worst, r.slack / lt);
        ++count;
      }
    }
  }
  const double total = Seconds(t0);
  out.pass &= total <= 1800.0;
  out.summary = Format("%d cases, min slack/lambda_t %+.3e (limit -1e-2), %.1fs (limit 1800s)",
                       count, worst, total);
  return out;
}

Outcome Suite::Subsolution() {
  Outcome out;
  const std::tuple<const char*, ConvexBody, ConvexBody> pairs[] = {
      {"disk+disk", Disk(), Disk()},
      {"square+disk", Square(), Disk()},
      {"square+rounded", Square(), Rounded()}};
  int cases = 0, refinements = 0;
  double worst_ratio = -1e300, min_shrink = 1e300;
  for (const auto& [name, k0, k1] : pairs) {
    for (double p : kPs) {
      for (double t : kTs) {
        const ConvexBody kt = MinkowskiCombination(k0, k1, t);
        double gap[3], rhs[3];
        for (int i = 0; i < 3; ++i) {
          const double h = kHs[i];
          const EigenResult& r0 = Principal(k0, p, h);
          const EigenResult& r1 = Principal(k1, p, h);
          const MaskedField target = Rasterize(kt, Grid::Covering(kt, h));
          const CombinationResult comb = SupCombination(r0.u, r1.u, target, {.t = t});
          rhs[i] = (1 - t) * r0.lambda + t * r1.lambda;
          const Report r = CheckSubsolutionQuotient(comb.u, rhs[i], p, tol_, t);
          gap[i] = -r.slack;
          out.pass &= r.pass;
          worst_ratio = std::max(worst_ratio, gap[i] / (h * rhs[i]));
          ++cases;
          if (!r.pass) {
            Detail("%-15s p=%.1f t=%.2f h=1/%.0f gap %+.4e tolerance %.4e FAIL", name, p, t,
                   1 / h, gap[i], r.tolerance);
          }
        }
        // Gaps at round-off level are treated as no violation.
        std::string shrink;
        for (int i = 0; i < 2; ++i) {
          if (gap[i] <= 1e-10 * rhs[i]) {
            shrink += " -";
            continue;
          }
          const double factor = gap[i + 1] > 0 ? gap[i] / gap[i + 1] : 1e300;
          ++refinements;
          min_shrink = std::min(min_shrink, factor);
          const bool ok = factor >= 1.5;
          out.pass &= ok;
          shrink += ok ? Format(" %.2f", factor) : Format(" %.2f(FAIL)", factor);
        }
        Detail("%-15s p=%.1f t=%.2f gap/rhs %+.3e %+.3e %+.3e shrink%s", name, p, t,
               gap[0] / rhs[0], gap[1] / rhs[1], gap[2] / rhs[2], shrink.c_str());
      }
    }
  }
  out.summary = Format("%d cases, max gap/(h rhs) %+.4f (c = %.4f), %d refinements with a "
                       "violation, min shrink %s",
                       cases, worst_ratio, tol_.subsolution_c, refinements,
                       refinements ? Format("%.2f (limit 1.5)", min_shrink).c_str() : "n/a");
  return out;
}

Outcome Suite::LogConcavity() {
  Outcome out;
  double worst = 1e300;
  int rejected = 0, bimodal = 0;
  const std::pair<const char*, ConvexBody> bodies[] = {{"square", Square()}, {"disk", Disk()}};
  for (const auto& [name, k] : bodies) {
    for (double p : kPs) {
      for (double h : kHs) {
        const EigenResult& r = Principal(k, p, h);
        const Report good = CheckLogConcavity(r.u, tol_, 1000, 42);
        const Report bad = CheckLogConcavity(BimodalField(r.u), tol_, 1000, 42);
        Detail("%-6s p=%.1f h=1/%.0f defect %+.4e tolerance %.4e %s  bimodal %+.4e %s", name,
               p, 1 / h, good.slack, good.tolerance, good.pass ? "ok" : "FAIL", bad.slack,
               bad.pass ? "PASSED(FAIL)" : "rejected");
        out.pass &= good.pass && !bad.pass;
        worst = std::min(worst, good.slack / h);
        ++bimodal;
        rejected += bad.pass ? 0 : 1;
      }
    }
  }
  out.summary = Format("min defect/h %+.4f (C = %.4f), bimodal rejected %d/%d", worst,
                       tol_.logconcavity_c, rejected, bimodal);
  return out;
}

Outcome Suite::Urysohn() {
  Outcome out;
  double worst = 1e300;
  const double h = 1.0 / 32;
  const std::pair<const char*, ConvexBody> bodies[] = {
      {"square", Square()}, {"rectangle", Slab()}, {"triangle", Triangle()}};
  for (const auto& [name, k] : bodies) {
    for (double p : kPs) {
      SolverConfig cfg;
      cfg.p = p;
      const Report r = CheckUrysohn(k, h, cfg, tol_);
      const double ball = r.Value("lambda_ball");
      Detail("%-9s p=%.1f lambda %.8f ball %.8f slack %+.4e %s", name, p, r.Value("lambda"),
             ball, r.slack, r.pass ? "ok" : "FAIL");
      out.pass &= r.pass;
      worst = std::min(worst, r.slack / ball);
    }
  }
  out.summary = Format("min slack/lambda_ball %+.4e (limit -1e-2)", worst);
  return out;
}

Outcome Suite::SupConvolutionSuite() {
  Outcome out;
  const double h = 1.0 / 32;
  struct Item {
    std::string name;
    MaskedField u;
    double q;
  };
  std::vector<Item> corpus;
  const std::pair<const char*, ConvexBody> eigen_bodies[] = {
      {"square", Square()}, {"disk", Disk()}, {"triangle", Triangle()}};
  for (const auto& [name, k] : eigen_bodies) {
    for (double p : kPs) {
      corpus.push_back({Format("eigen_%s_p%.1f", name, p), Principal(k, p, h).u,
                        SupConvParams::ForExponent(p, 1.0).q});
    }
  }
  auto sampled = [&](const ConvexBody& k, const std::function<double(Point)>& f) {
    const MaskedField mask = Rasterize(k, Grid::Covering(k, h));
    const Grid& g = mask.grid();
    std::vector<double> v(g.size());
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) v[g.Index(i, j)] = f(g.Node(i, j));
    }
    return mask.WithValues(std::move(v));
  };
  for (int seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    corpus.push_back({Format("random_%d", seed),
                      sampled(seed % 2 ? Square() : Disk(), [&](Point) { return uniform(rng); }),
                      seed <= 2 ? 2.0 : 3.0});
  }
  corpus.push_back({"cone_disk", sampled(Disk(), [](Point x) { return 1 - std::hypot(x.x, x.y); }),
                    2.0});
  corpus.push_back({"cone_triangle",
                    sampled(Triangle(), [](Point x) { return 2 - std::abs(x.x) - std::abs(x.y); }),
                    3.0});
  corpus.push_back({"wave_square",
                    sampled(Square(), [](Point x) { return 1 + std::sin(3 * x.x) * std::cos(2 * x.y); }),
                    2.0});
  corpus.push_back({"bimodal_disk", BimodalField(Principal(Disk(), 2.0, h).u), 2.0});
  corpus.push_back({"step_square", sampled(Square(), [](Point x) { return x.x > 0 ? 1.0 : 0.2; }),
                    2.0});
  corpus.push_back({"saddle_rectangle",
                    sampled(Slab(), [](Point x) { return x.x * x.x - 4 * x.y * x.y; }), 2.0});
  corpus.push_back({"bump_rounded", sampled(Rounded(), [](Point x) {
                      return std::exp(-((x.x - 0.3) * (x.x - 0.3) + x.y * x.y) / 0.1);
                    }),
                    4.0});

  const double eps[] = {1e-1, 1e-2, 1e-3};
  int failures = 0;
  for (const Item& item : corpus) {
    const std::vector<Report> rs = CheckSupConvolution(item.u, item.q, eps, tol_, item.name);
    std::string line;
    bool ok = true;
    for (const Report& r : rs) {
      ok &= r.pass;
      line += Format(" %s %+.2e%s", r.check.substr(8).c_str(), r.slack, r.pass ? "" : "(FAIL)");
    }
    Detail("%-18s q=%.2f%s", item.name.c_str(), item.q, line.c_str());
    out.pass &= ok;
    failures += ok ? 0 : 1;
  }
  out.summary = Format("%zu fields, %d with a failing property", corpus.size(), failures);
  return out;
}

Outcome Suite::Geometry() {
  Outcome out;
  using std::numbers::pi;
  std::vector<std::pair<std::string, ConvexBody>> bodies = {
      {"square", Square()}, {"disk", Disk()}, {"triangle", Triangle()},
      {"rectangle", Slab()}, {"rounded", Rounded()}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.0, 2 * pi), radius(0.5, 2.0);
  for (int i = 0; i < 5; ++i) {
    std::vector<Point> pts;
    for (int v = 0; v < 4 + 3 * i; ++v) {
      const double a = angle(rng), r = radius(rng);
      pts.push_back({r * std::cos(a) + 0.1 * i, r * std::sin(a)});
    }
    bodies.emplace_back(Format("random_%d", i),
                        ConvexBody::FromVertices(testing_oracles::Hull(pts)));
  }

  double support_err = 0.0, width_err = 0.0, hull_err = 0.0;
  bool counts_match = true;
  for (size_t a = 0; a < bodies.size(); ++a) {
    for (size_t b = 0; b < bodies.size(); ++b) {
      const ConvexBody& k0 = bodies[a].second;
      const ConvexBody& k1 = bodies[b].second;
      for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const ConvexBody kt = MinkowskiCombination(k0, k1, t);
        for (int i = 0; i < 720; ++i) {
          const Direction y = Direction::FromAngle(2 * pi * (i + 0.37) / 720);
          support_err = std::max(
              support_err, std::abs(SupportFunction(kt, y) - (1 - t) * SupportFunction(k0, y) -
                                    t * SupportFunction(k1, y)));
        }
        width_err = std::max(width_err, std::abs(MeanWidth(kt) - (1 - t) * MeanWidth(k0) -
                                                 t * MeanWidth(k1)));
        std::vector<Point> combos;
        for (Point u : k0.vertices()) {
          for (Point v : k1.vertices()) combos.push_back((1 - t) * u + t * v);
        }
        const std::vector<Point> hull = testing_oracles::Hull(combos);
        if (hull.size() != kt.size()) {
          counts_match = false;
          Detail("%s+%s t=%.2f: %zu vertices, hull oracle %zu", bodies[a].first.c_str(),
                 bodies[b].first.c_str(), t, kt.size(), hull.size());
          continue;
        }
        // Nearest-vertex distance both ways, independent of the start vertex.
        auto nearest = [](Point p, const auto& pts) {
          double d = 1e300;
          for (Point q : pts) d = std::min(d, std::hypot(p.x - q.x, p.y - q.y));
          return d;
        };
        for (Point v : hull) hull_err = std::max(hull_err, nearest(v, kt.vertices()));
        for (Point v : kt.vertices()) hull_err = std::max(hull_err, nearest(v, hull));
      }
    }
  }
  const double square_err = std::abs(MeanWidth(Square()) - 8 / pi);
  Detail("%zu bodies, %zu ordered pairs, 5 values of t", bodies.size(),
         bodies.size() * bodies.size());
  Detail("support additivity max error %.3e (limit 1e-6)", support_err);
  Detail("mean width linearity max error %.3e (limit 1e-6)", width_err);
  Detail("vertex-pair hull max error %.3e (limit 1e-9), vertex counts %s", hull_err,
         counts_match ? "match" : "DIFFER");
  Detail("square mean width %.12f, 8/pi %.12f, error %.3e (limit 1e-6)", MeanWidth(Square()),
         8 / pi, square_err);
  out.pass = support_err <= 1e-6 && width_err <= 1e-6 && hull_err <= 1e-9 && counts_match &&
             square_err <= 1e-6;
  out.summary = Format("support %.1e, mean width %.1e, hull %.1e, square %.1e", support_err,
                       width_err, hull_err, square_err);
  return out;
}

int RunCli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::map<std::string, std::string> Outputs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).string();
    // Timestamps and argv live in the manifest; the effective config holds
    // the output directory.
    if (rel == "manifest.json" || rel == "config.json") continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    files[rel] = ss.str();
  }
  return files;
}

bool Suite::CliDeterministic(const json& config, const fs::path& dir, std::string* why) {
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << config.dump(2);
  const int a = RunCli(cli_, "--config " + cfg.string() + " -o " + (dir / "a").string());
  const int b = RunCli(cli_, "--config " + cfg.string() + " -o " + (dir / "b").string() +
                                 " --jobs 2");
  if (a != 0 || b != 0) {
    *why = Format("exit status %d and %d", a, b);
    return false;
  }
  const auto fa = Outputs(dir / "a"), fb = Outputs(dir / "b");
  if (fa.empty() || fa != fb) {
    *why = Format("%zu and %zu output files, contents differ", fa.size(), fb.size());
    return false;
  }
  *why = Format("%zu files byte-identical", fa.size());
  return true;
}

Outcome Suite::Invariants() {
  Outcome out;

  // Rayleigh quotient is invariant under positive scaling.
  double homog = 0.0;
  std::vector<MaskedField> fields;
  for (const auto& [key, r] : cache_) fields.push_back(r.u);
  {
    const ConvexBody k = Rounded();
    const MaskedField mask = Rasterize(k, Grid::Covering(k, 1.0 / 32));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> v(mask.grid().size());
    for (double& x : v) x = uniform(rng);
    fields.push_back(mask.WithValues(std::move(v)));
  }
  for (const MaskedField& u : fields) {
    for (double p : kPs) {
      const double base = RayleighQuotient(u, p);
      for (double c : {1e-3, 0.5, 7.0, 1e3}) {
        homog = std::max(homog, std::abs(RayleighQuotient(u.Scaled(c), p) - base) / base);
      }
    }
  }
  const bool homog_ok = homog <= 1e-12;
  Detail("quotient homogeneity: %zu fields x 3 p x 4 scales, max relative change %.2e %s",
         fields.size(), homog, homog_ok ? "ok" : "FAIL");

  // Every cached eigenfunction is nonnegative with sup exactly one.
  double min_value = 1e300, sup_err = 0.0;
  for (const auto& [key, r] : cache_) {
    min_value = std::min(min_value, r.u.Inf());
    sup_err = std::max(sup_err, std::abs(r.u.Sup() - 1.0));
  }
  const bool sign_ok = !cache_.empty() && min_value >= 0.0 && sup_err <= 1e-12;
  Detail("eigenfunctions: %zu, min value %.3e, max |sup - 1| %.2e %s", cache_.size(), min_value,
         sup_err, sign_ok ? "ok" : "FAIL");

  bool mono_ok = true;
  const std::tuple<const char*, ConvexBody, ConvexBody> nested[] = {
      {"disk0.9<square", RegularPolygon(64, 0.9), Square()},
      {"triangle<square", Triangle(), Square()},
      {"square0.5<disk", Rectangle(-0.5, 0.5, -0.5, 0.5), Disk()}};
  for (const auto& [name, inner, outer] : nested) {
    for (double p : kPs) {
      SolverConfig cfg;
      cfg.p = p;
      const Report r = CheckDomainMonotonicity(inner, outer, 1.0 / 32, cfg, tol_);
      Detail("%-16s p=%.1f inner %.8f outer %.8f slack %+.4e %s", name, p,
             r.Value("lambda_inner"), r.Value("lambda_outer"), r.slack, r.pass ? "ok" : "FAIL");
      mono_ok &= r.pass;
    }
  }

  const fs::path dir = fs::temp_directory_path() / Format("gpf_acceptance_%d", getpid());
  fs::remove_all(dir);
  const json bodies = {{"square", {{"rectangle", {-1, 1, -1, 1}}}},
                       {"disk", {{"regular_polygon", {{"m", 64}, {"radius", 1.0}}}}}};
  const json bm = {{"command", "bm"},
                   {"bodies", bodies},
                   {"pairs", json::array({json::array({"square", "disk"})})},
                   {"p", {1.5, 2}},
                   {"t", {0.5}},
                   {"h", 1.0 / 16},
                   {"subsolution", true},
                   {"solver", {{"init", "random"}}},
                   {"seed", 42}};
  const json logcc = {{"command", "logcc"}, {"bodies", bodies}, {"targets", {"square", "disk"}},
                      {"p", {3}},           {"h", 1.0 / 16},     {"seed", 42}};
  std::string why_bm, why_logcc;
  const bool cli_ok = CliDeterministic(bm, dir / "bm", &why_bm) &
                      CliDeterministic(logcc, dir / "logcc", &why_logcc);
  fs::remove_all(dir);
  Detail("CLI determinism: bm %s; logcc %s %s", why_bm.c_str(), why_logcc.c_str(),
         cli_ok ? "ok" : "FAIL");

  out.pass = homog_ok && sign_ok && mono_ok && cli_ok;
  out.summary = Format("homogeneity %s, sign/sup %s, monotonicity %s, CLI determinism %s",
                       homog_ok ? "ok" : "FAIL", sign_ok ? "ok" : "FAIL",
                       mono_ok ? "ok" : "FAIL", cli_ok ? "ok" : "FAIL");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpf acceptance suite"};
  std::vector<int> only;
  std::string tolerances = GPF_TOLERANCES_PATH;
  std::string cli = GPF_CLI_PATH;
  app.add_option("--only", only, "Criteria to run (default: all)")->check(CLI::Range(1, 9))
      ->delimiter(',');
  app.add_option("--tolerances", tolerances, "Tolerances file");
  app.add_option("--cli", cli, "gpf_cli executable");
  CLI11_PARSE(app, argc, argv);

  Suite suite(Tolerances::Load(tolerances), cli);
  struct Criterion {
    int id;
    const char* name;
    Outcome (Suite::*run)();
  };
  // Criterion 9 reuses the eigenfunctions cached by the earlier criteria.
  const Criterion criteria[] = {
      {1, "p=2 oracle agreement", &Suite::OracleAgreement},
      {2, "self-convergence", &Suite::SelfConvergence},
      {3, "Brunn-Minkowski matrix", &Suite::BrunnMinkowski},
      {4, "subsolution quotient", &Suite::Subsolution},
      {5, "log-concavity", &Suite::LogConcavity},
      {6, "Urysohn", &Suite::Urysohn},
      {7, "sup-convolution corpus", &Suite::SupConvolutionSuite},
      {8, "geometry", &Suite::Geometry},
      {9, "invariants", &Suite::Invariants},
  };
  const std::set<int> selected(only.begin(), only.end());
  std::vector<std::string> lines;
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    std::printf("criterion %d (%s)\n", c.id, c.name);
    std::fflush(stdout);
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = (suite.*c.run)();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all &= o.pass;
    lines.push_back(Format("criterion %d: %s  %s: %s [%.1fs]", c.id, o.pass ? "PASS" : "FAIL",
                           c.name, o.summary.c_str(), Seconds(t0)));
  }
  std::printf("\n");
  for (const std::string& l : lines) std::printf("%s\n", l.c_str());
  return all ? 0 : 1;
}
