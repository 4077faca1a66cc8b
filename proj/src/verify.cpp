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

#include "gpf/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "gpf/error.hpp"
#include "json.hpp"

namespace gpf {

using Json = nlohmann::ordered_json;

void Report::Finalize() {
  if (!error.empty()) {
    pass = false;
    return;
  }
  auto finite = [&](double v, const std::string& what) {
    if (!std::isfinite(v)) {
      Fail(ErrorCode::kInternal, check + ": non-finite " + what);
    }
  };
  finite(slack, "slack");
  finite(tolerance, "tolerance");
  for (const auto& [k, v] : inputs) finite(v, k);
  for (const auto& [k, v] : values) finite(v, k);
  pass = slack >= -tolerance;
}

bool Report::Consistent() const {
  if (!error.empty()) return !pass;
  return pass == (slack >= -tolerance);
}

double Report::Value(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  Fail(ErrorCode::kInvalidArgument,
       "report " + check + " has no value '" + std::string(key) + "'");
}

Report FailedReport(std::string check, std::string bodies, std::string error) {
  Report r;
  r.check = std::move(check);
  r.bodies = std::move(bodies);
  r.error = std::move(error);
  r.Finalize();
  return r;
}

std::string ReportJson(const Report& r) {
  Json in = Json::object();
  in["bodies"] = r.bodies;
  if (r.p) in["p"] = *r.p;
  if (r.t) in["t"] = *r.t;
  if (r.h) in["h"] = *r.h;
  for (const auto& [k, v] : r.inputs) in[k] = v;
  Json vals = Json::object();
  for (const auto& [k, v] : r.values) vals[k] = v;
  Json j;
  j["check"] = r.check;
  j["inputs"] = std::move(in);
  j["values"] = std::move(vals);
  if (r.error.empty()) {
    j["slack"] = r.slack;
    j["tolerance"] = r.tolerance;
  } else {
    j["error"] = r.error;
  }
  j["verdict"] = r.pass ? "pass" : "fail";
  return j.dump(2) + "\n";
}

Report ReportFromJson(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kIo, std::string("report JSON: ") + e.what());
  }
  try {
    Report r;
    r.check = j.at("check").get<std::string>();
    for (const auto& [k, v] : j.at("inputs").items()) {
      if (k == "bodies") {
        r.bodies = v.get<std::string>();
      } else if (k == "p") {
        r.p = v.get<double>();
      } else if (k == "t") {
        r.t = v.get<double>();
      } else if (k == "h") {
        r.h = v.get<double>();
      } else {
        r.inputs.emplace_back(k, v.get<double>());
      }
    }
    for (const auto& [k, v] : j.at("values").items()) {
      r.values.emplace_back(k, v.get<double>());
    }
    if (j.contains("error")) {
      r.error = j.at("error").get<std::string>();
    } else {
      r.slack = j.at("slack").get<double>();
      r.tolerance = j.at("tolerance").get<double>();
    }
    r.pass = j.at("verdict").get<std::string>() == "pass";
    return r;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kIo, std::string("report JSON: ") + e.what());
  }
}

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : ""; }

}  // namespace

std::string SummaryCsvHeader() { return "check,bodies,p,t,h,slack,verdict\n"; }

std::string SummaryCsvRow(const Report& r) {
  return r.check + "," + r.bodies + "," + Opt(r.p) + "," + Opt(r.t) + "," +
         Opt(r.h) + "," + (r.error.empty() ? Num(r.slack) : "") + "," +
         (r.pass ? "pass" : "fail") + "\n";
}

std::string DigestHex(const ConvexBody& body) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(Digest(body)));
  return buf;
}

Tolerances Tolerances::FromJson(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kIo, std::string("tolerances: ") + e.what());
  }
  Require(j.is_object(), "tolerances: expected a JSON object");
  Tolerances t;
  auto read = [&](const char* key, double& dst, bool required) {
    if (!j.contains(key)) {
      Require(!required, std::string("tolerances: missing '") + key + "'");
      return;
    }
    const Json& v = j.at(key);
    Require(v.is_number(), std::string("tolerances: '") + key + "' must be a number");
    dst = v.get<double>();
    Require(std::isfinite(dst) && dst >= 0.0,
            std::string("tolerances: '") + key + "' must be finite and >= 0");
  };
  read("bm_relative", t.bm_relative, false);
  read("urysohn_relative", t.urysohn_relative, false);
  read("monotone_relative", t.monotone_relative, false);
  read("oracle_relative", t.oracle_relative, false);
  read("semiconvexity", t.semiconvexity, false);
  read("subsolution_c", t.subsolution_c, true);
  read("logconcavity_c", t.logconcavity_c, true);
  return t;
}

Tolerances Tolerances::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open tolerances file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

namespace {

void EchoConfig(Report& r, const SolverConfig& cfg) {
  r.inputs.emplace_back("delta", cfg.EffectiveDelta());
  r.inputs.emplace_back("tol", cfg.tol);
  r.inputs.emplace_back("stall_window", cfg.stall_window);
  r.inputs.emplace_back("max_iter", cfg.max_iter);
  r.inputs.emplace_back("inner_tol", cfg.inner_tol);
  r.inputs.emplace_back("residual_tol", cfg.residual_tol);
}

EigenResult Solve(const ConvexBody& body, double h, const SolverConfig& cfg) {
  return SolvePrincipal(body, Grid::Covering(body, h), cfg);
}

}  // namespace

Report SolveReport(const ConvexBody& body, double h, const SolverConfig& cfg,
                   const EigenResult& result,
                   std::optional<double> oracle_lambda, const Tolerances& tol) {
  Report r;
  r.check = "solve";
  r.bodies = DigestHex(body);
  r.p = cfg.p;
  r.h = h;
  EchoConfig(r, cfg);
  r.values = {{"lambda", result.lambda},
              {"weak_residual", result.weak_residual},
              {"strong_residual", result.strong_residual},
              {"convergence_slack", result.convergence_slack},
              {"iterations", static_cast<double>(result.iterations)},
              {"fallback_steps", static_cast<double>(result.fallback_steps)},
              {"interior_nodes", static_cast<double>(result.u.interior_count())}};
  if (oracle_lambda) {
    const double diff = std::abs(result.lambda - *oracle_lambda);
    r.values.emplace_back("oracle_lambda", *oracle_lambda);
    r.values.emplace_back("relative_difference", diff / *oracle_lambda);
    r.slack = tol.oracle_relative * *oracle_lambda - diff;
  }
  r.Finalize();
  return r;
}

Report BmReport(const ConvexBody& k0, const ConvexBody& k1, double t, double h,
                double p, double lambda0, double lambda1, double lambda_t,
                const Tolerances& tol) {
  Require(t >= 0.0 && t <= 1.0, "bm check needs t in [0, 1]");
  Report r;
  r.check = "bm";
  r.bodies = DigestHex(k0) + "+" + DigestHex(k1);
  r.p = p;
  r.t = t;
  r.h = h;
  const double rhs = (1.0 - t) * lambda0 + t * lambda1;
  r.values = {{"lambda0", lambda0},
              {"lambda1", lambda1},
              {"lambda_t", lambda_t},
              {"rhs", rhs}};
  r.slack = rhs - lambda_t;
  r.tolerance = tol.bm_relative * lambda_t;
  r.Finalize();
  return r;
}

Report CheckBm(const ConvexBody& k0, const ConvexBody& k1, double t, double h,
               const SolverConfig& cfg, const Tolerances& tol) {
  Require(t >= 0.0 && t <= 1.0, "bm check needs t in [0, 1]");
  const ConvexBody kt = MinkowskiCombination(k0, k1, t);
  const double l0 = Solve(k0, h, cfg).lambda;
  const double l1 = Solve(k1, h, cfg).lambda;
  const double lt = Solve(kt, h, cfg).lambda;
  Report r = BmReport(k0, k1, t, h, cfg.p, l0, l1, lt, tol);
  EchoConfig(r, cfg);
  return r;
}

Report CheckSubsolutionQuotient(const MaskedField& u_t, double lambda_t,
                                double p, const Tolerances& tol,
                                std::optional<double> t,
                                const std::string& bodies) {
  Report r;
  r.check = "subsolution_quotient";
  r.bodies = bodies;
  r.p = p;
  r.t = t;
  r.h = u_t.grid().h;
  const double rq = RayleighQuotient(u_t, p);
  r.values = {{"lambda_t", lambda_t}, {"quotient", rq}};
  r.slack = lambda_t - rq;
  r.tolerance = tol.subsolution_c * u_t.grid().h * lambda_t;
  r.Finalize();
  return r;
}

Report CheckLogConcavity(const MaskedField& u, const Tolerances& tol,
                         int samples, std::uint64_t seed) {
  Require(samples >= 10, "log-concavity check needs at least 10 samples");
  const Grid& g = u.grid();
  const double floor = 1e-9 * u.Sup();
  auto positive = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < g.nx && j < g.ny && u.interior(i, j) &&
           u.at(i, j) > floor;
  };
  std::vector<std::pair<int, int>> nodes;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (positive(i, j)) nodes.emplace_back(i, j);
    }
  }
  if (nodes.size() < 2) {
    Fail(ErrorCode::kDegenerate, "log-concavity check: positivity set too small");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  double defect = std::numeric_limits<double>::infinity();
  Point worst_a, worst_b;
  int valid = 0;
  const long long max_attempts = 200LL * samples;
  for (long long attempt = 0; attempt < max_attempts && valid < samples; ++attempt) {
    const auto [ia, ja] = nodes[pick(rng)];
    const auto [ib, jb] = nodes[pick(rng)];
    if (ia == ib && ja == jb) continue;
    const Point a = g.Node(ia, ja);
    const Point b = g.Node(ib, jb);
    const Point m = 0.5 * (a + b);
    const int ci = static_cast<int>(std::floor((m.x - g.origin.x) / g.h));
    const int cj = static_cast<int>(std::floor((m.y - g.origin.y) / g.h));
    if (!positive(ci, cj) || !positive(ci + 1, cj) || !positive(ci, cj + 1) ||
        !positive(ci + 1, cj + 1)) {
      continue;
    }
    ++valid;
    const double d = std::log(Interpolate(u, m)) -
                     0.5 * (std::log(u.at(ia, ja)) + std::log(u.at(ib, jb)));
    if (d < defect) {
      defect = d;
      worst_a = a;
      worst_b = b;
    }
  }
  if (valid < 10) {
    Fail(ErrorCode::kDegenerate,
         "log-concavity check: fewer than 10 valid pairs (" +
             std::to_string(valid) + ")");
  }

  Report r;
  r.check = "logconcavity";
  r.h = g.h;
  r.inputs = {{"samples", static_cast<double>(samples)},
              {"seed", static_cast<double>(seed)}};
  r.values = {{"defect", defect},
              {"pairs", static_cast<double>(valid)},
              {"worst_ax", worst_a.x},
              {"worst_ay", worst_a.y},
              {"worst_bx", worst_b.x},
              {"worst_by", worst_b.y}};
  r.slack = defect;
  r.tolerance = tol.logconcavity_c * g.h;
  r.Finalize();
  return r;
}

MaskedField BimodalField(const MaskedField& mask) {
  const Grid& g = mask.grid();
  // Centers at +-0.6 of the interior's half extent along x.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double ylo = lo;
  double yhi = -lo;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!mask.interior(i, j)) continue;
      const Point x = g.Node(i, j);
      lo = std::min(lo, x.x);
      hi = std::max(hi, x.x);
      ylo = std::min(ylo, x.y);
      yhi = std::max(yhi, x.y);
    }
  }
  const Point mid{0.5 * (lo + hi), 0.5 * (ylo + yhi)};
  const double half = 0.5 * (hi - lo);
  const Point c0{mid.x - 0.6 * half, mid.y};
  const Point c1{mid.x + 0.6 * half, mid.y};
  const double s2 = std::pow(0.25 * half, 2);
  std::vector<double> v(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Point x = g.Node(i, j);
      const Point d0 = x - c0;
      const Point d1 = x - c1;
      v[g.Index(i, j)] = std::exp(-Dot(d0, d0) / s2) + std::exp(-Dot(d1, d1) / s2);
    }
  }
  MaskedField out = mask.WithValues(std::move(v));
  return out.Scaled(1.0 / out.Sup());
}

Report CheckUrysohn(const ConvexBody& body, double h, const SolverConfig& cfg,
                    const Tolerances& tol, int ball_vertices) {
  const ConvexBody ball = MatchingBall(body, ball_vertices);
  const double l = Solve(body, h, cfg).lambda;
  const double lb = Solve(ball, h, cfg).lambda;
  Report r;
  r.check = "urysohn";
  r.bodies = DigestHex(body) + "+" + DigestHex(ball);
  r.p = cfg.p;
  r.h = h;
  EchoConfig(r, cfg);
  r.inputs.emplace_back("ball_vertices", ball_vertices);
  r.values = {{"lambda", l},
              {"lambda_ball", lb},
              {"mean_width", MeanWidth(body)},
              {"mean_width_ball", MeanWidth(ball)},
              {"ball_circumradius", Norm(ball.vertices()[0])}};
  r.slack = l - lb;
  r.tolerance = tol.urysohn_relative * lb;
  r.Finalize();
  return r;
}

Report CheckDomainMonotonicity(const ConvexBody& inner, const ConvexBody& outer,
                               double h, const SolverConfig& cfg,
                               const Tolerances& tol) {
  Require(IsSubset(inner, outer),
          "domain monotonicity check: inner body is not contained in outer body");
  const double li = Solve(inner, h, cfg).lambda;
  const double lo = Solve(outer, h, cfg).lambda;
  Report r;
  r.check = "domain_monotonicity";
  r.bodies = DigestHex(inner) + "+" + DigestHex(outer);
  r.p = cfg.p;
  r.h = h;
  EchoConfig(r, cfg);
  r.values = {{"lambda_inner", li}, {"lambda_outer", lo}};
  r.slack = li - lo;
  r.tolerance = tol.monotone_relative * lo;
  r.Finalize();
  return r;
}

std::vector<Report> CheckSupConvolution(const MaskedField& u, double q,
                                        std::span<const double> epsilons,
                                        const Tolerances& tol,
                                        const std::string& bodies) {
  Require(epsilons.size() >= 2, "sup-convolution check needs at least two epsilons");
  std::vector<double> eps(epsilons.begin(), epsilons.end());
  std::sort(eps.begin(), eps.end(), std::greater<>());
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    Require(eps[k] > eps[k + 1], "sup-convolution epsilons must be distinct");
  }

  const Grid& g = u.grid();
  const double lip = LipschitzConstant(u);
  const double osc = u.Sup() - u.Inf();

  auto base = [&](const char* name) {
    Report r;
    r.check = name;
    r.bodies = bodies;
    r.h = g.h;
    r.inputs.emplace_back("q", q);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      r.inputs.emplace_back("epsilon_" + std::to_string(k), eps[k]);
    }
    return r;
  };
  Report dom = base("supconv_domination");
  Report mono = base("supconv_monotonicity");
  Report conv = base("supconv_convergence");
  Report semi = base("supconv_semiconvexity");
  Report fast = base("supconv_fast_path");

  double dom_min = std::numeric_limits<double>::infinity();
  double mono_min = std::numeric_limits<double>::infinity();
  double conv_min = std::numeric_limits<double>::infinity();
  double semi_min = std::numeric_limits<double>::infinity();
  double mismatches = 0.0;
  std::vector<double> prev;
  double prev_gap = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const SupConvParams prm{.epsilon = eps[k], .q = q};
    const MaskedField ue = SupConvolutionFast(u, prm);
    const MaskedField ref = SupConvolution(u, prm);
    const auto a = ue.values();
    const auto b = ref.values();
    const auto v = u.values();
    double gap = 0.0;
    double node_dom = std::numeric_limits<double>::infinity();
    double count = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
      if (std::bit_cast<std::uint64_t>(a[n]) != std::bit_cast<std::uint64_t>(b[n])) {
        count += 1.0;
      }
      if (!u.mask()[n]) continue;
      node_dom = std::min(node_dom, a[n] - v[n]);
      gap = std::max(gap, a[n] - v[n]);
      if (!prev.empty()) mono_min = std::min(mono_min, prev[n] - a[n]);
    }
    mismatches += count;
    dom_min = std::min(dom_min, node_dom);
    // sup_r (L r - r^q / (q eps^{q-1})) bounds the gap and vanishes with eps.
    const double bound =
        std::min(osc, (1.0 - 1.0 / q) * eps[k] * std::pow(lip, q / (q - 1.0))) *
        (1.0 + 1e-12);
    conv_min = std::min(conv_min, bound - gap);
    if (k > 0) conv_min = std::min(conv_min, prev_gap - gap);

    const double c = SemiconvexityConstant(prm, lip);
    const double margin = AttainmentRadius(u, prm);
    const SemiconvexityResult sc = SemiconvexityDefect(ue, c, margin);
    const std::string idx = std::to_string(k);
    semi.values.emplace_back("constant_" + idx, c);
    semi.values.emplace_back("margin_" + idx, margin);
    semi.values.emplace_back("nodes_" + idx, static_cast<double>(sc.nodes_checked));
    if (sc.nodes_checked > 0) {
      semi.values.emplace_back("defect_" + idx, sc.defect);
      semi_min = std::min(semi_min, sc.defect);
    }
    conv.values.emplace_back("gap_" + idx, gap);
    conv.values.emplace_back("bound_" + idx, bound);
    fast.values.emplace_back("mismatches_" + idx, count);

    prev.assign(a.begin(), a.end());
    prev_gap = gap;
  }

  dom.values = {{"min_excess", dom_min}};
  dom.slack = dom_min;
  dom.tolerance = 0.0;
  mono.values = {{"min_increment", mono_min}};
  mono.slack = mono_min;
  mono.tolerance = 0.0;
  conv.values.emplace_back("lipschitz", lip);
  conv.slack = conv_min;
  conv.tolerance = 0.0;
  semi.values.emplace_back("lipschitz", lip);
  semi.tolerance = tol.semiconvexity;
  fast.slack = mismatches > 0.0 ? -mismatches : 0.0;
  fast.tolerance = 0.0;

  std::vector<Report> out;
  for (Report* r : {&dom, &mono, &conv}) {
    r->Finalize();
    out.push_back(std::move(*r));
  }
  if (std::isfinite(semi_min)) {
    semi.slack = semi_min;
    semi.Finalize();
    out.push_back(std::move(semi));
  } else {
    out.push_back(FailedReport("supconv_semiconvexity", bodies,
                               "no node lies farther than the attainment radius "
                               "from the boundary"));
  }
  fast.Finalize();
  out.push_back(std::move(fast));
  return out;
}

}  // namespace gpf
