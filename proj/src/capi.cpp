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

#include "gpf/gpf.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "gpf/convolution.hpp"
#include "gpf/eigensolver.hpp"
#include "gpf/error.hpp"
#include "gpf/field.hpp"
#include "gpf/geometry.hpp"
#include "gpf/verify.hpp"

struct gpf_body {
  gpf::ConvexBody body;
  std::string digest;
};

struct gpf_field {
  gpf::MaskedField field;
};

struct gpf_report {
  gpf::Report report;
  std::string json;
  std::string csv;
};

struct gpf_report_list {
  std::vector<gpf_report> reports;
};

namespace {

thread_local std::string last_error;

gpf_status SetError(gpf_status status, const std::string& what) {
  last_error = what;
  return status;
}

// Runs fn, mapping exceptions to status codes and the thread's last error.
template <typename Fn>
gpf_status Guard(Fn&& fn) {
  try {
    fn();
    return GPF_OK;
  } catch (const gpf::Error& e) {
    return SetError(static_cast<gpf_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(GPF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(GPF_ERR_INTERNAL, e.what());
  }
}

void NotNull(const void* p, const char* what) {
  gpf::Require(p != nullptr, std::string(what) + " must not be NULL");
}

gpf_body* NewBody(gpf::ConvexBody body) {
  std::string digest = gpf::DigestHex(body);
  return new gpf_body{std::move(body), std::move(digest)};
}

gpf_report* NewReport(gpf::Report report) {
  auto* r = new gpf_report{std::move(report), {}, {}};
  r->json = gpf::ReportJson(r->report);
  r->csv = gpf::SummaryCsvRow(r->report);
  return r;
}

gpf::SolverConfig ToConfig(const gpf_solver_config* c) {
  NotNull(c, "solver config");
  gpf::SolverConfig cfg;
  cfg.p = c->p;
  cfg.delta = c->delta;
  cfg.tol = c->tol;
  cfg.stall_window = c->stall_window;
  cfg.max_iter = c->max_iter;
  cfg.inner_tol = c->inner_tol;
  cfg.residual_tol = c->residual_tol;
  gpf::Require(c->init >= GPF_INIT_ORACLE && c->init <= GPF_INIT_RANDOM,
               "unknown initialization");
  cfg.init = static_cast<gpf::Initialization>(c->init);
  cfg.seed = c->seed;
  cfg.Validate();
  return cfg;
}

gpf::Tolerances ToTolerances(const gpf_tolerances* t) {
  NotNull(t, "tolerances");
  gpf::Tolerances out;
  out.bm_relative = t->bm_relative;
  out.urysohn_relative = t->urysohn_relative;
  out.monotone_relative = t->monotone_relative;
  out.oracle_relative = t->oracle_relative;
  out.semiconvexity = t->semiconvexity;
  out.subsolution_c = t->subsolution_c;
  out.logconcavity_c = t->logconcavity_c;
  return out;
}

gpf::MaskedField Rasterized(const gpf::ConvexBody& body, double h) {
  gpf::Require(h > 0.0 && std::isfinite(h), "grid spacing must be positive");
  return gpf::Rasterize(body, gpf::Grid::Covering(body, h));
}

}  // namespace

extern "C" {

const char* gpf_version(void) { return "1.0.0"; }

const char* gpf_last_error(void) { return last_error.c_str(); }

const char* gpf_status_name(gpf_status status) {
  switch (status) {
    case GPF_OK: return "ok";
    case GPF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GPF_ERR_DEGENERATE: return "degenerate input";
    case GPF_ERR_NOT_CONVERGED: return "not converged";
    case GPF_ERR_IO: return "i/o error";
    case GPF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

gpf_status gpf_body_from_vertices(const double* xy, size_t n, gpf_body** out) {
  return Guard([&] {
    NotNull(out, "out");
    gpf::Require(xy != nullptr || n == 0, "vertex array must not be NULL");
    std::vector<gpf::Point> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = {xy[2 * i], xy[2 * i + 1]};
    *out = NewBody(gpf::ConvexBody::FromVertices(std::move(v)));
  });
}

gpf_status gpf_body_rectangle(double xmin, double xmax, double ymin,
                              double ymax, gpf_body** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = NewBody(gpf::Rectangle(xmin, xmax, ymin, ymax));
  });
}

gpf_status gpf_body_regular_polygon(int m, double circumradius, double cx,
                                    double cy, double phase, gpf_body** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = NewBody(gpf::RegularPolygon(m, circumradius, {cx, cy}, phase));
  });
}

gpf_status gpf_body_read_file(const char* path, gpf_body** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    std::ifstream in(path);
    if (!in) gpf::Fail(gpf::ErrorCode::kIo, std::string("cannot open ") + path);
    try {
      *out = NewBody(gpf::ConvexBody::FromVertices(gpf::ReadVertexList(in)));
    } catch (const gpf::Error& e) {
      throw gpf::Error(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

gpf_status gpf_body_minkowski(const gpf_body* k0, const gpf_body* k1, double t,
                              gpf_body** out) {
  return Guard([&] {
    NotNull(k0, "k0");
    NotNull(k1, "k1");
    NotNull(out, "out");
    *out = NewBody(gpf::MinkowskiCombination(k0->body, k1->body, t));
  });
}

gpf_status gpf_body_matching_ball(const gpf_body* k, int m, gpf_body** out) {
  return Guard([&] {
    NotNull(k, "body");
    NotNull(out, "out");
    *out = NewBody(gpf::MatchingBall(k->body, m));
  });
}

void gpf_body_free(gpf_body* body) { delete body; }

size_t gpf_body_vertex_count(const gpf_body* body) {
  return body ? body->body.size() : 0;
}

gpf_status gpf_body_vertices(const gpf_body* body, double* xy, size_t n) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(xy, "xy");
    const auto v = body->body.vertices();
    for (size_t i = 0; i < n && i < v.size(); ++i) {
      xy[2 * i] = v[i].x;
      xy[2 * i + 1] = v[i].y;
    }
  });
}

gpf_status gpf_body_support(const gpf_body* body, double yx, double yy,
                            double* out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    *out = gpf::SupportFunction(body->body, gpf::Direction::Normalized(yx, yy));
  });
}

gpf_status gpf_body_width(const gpf_body* body, double yx, double yy,
                          double* out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    *out = gpf::Width(body->body, gpf::Direction::Normalized(yx, yy));
  });
}

gpf_status gpf_body_mean_width(const gpf_body* body, double* out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    *out = gpf::MeanWidth(body->body);
  });
}

gpf_status gpf_body_contains(const gpf_body* body, double x, double y,
                             int* out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    *out = gpf::Contains(body->body, {x, y}) ? 1 : 0;
  });
}

gpf_status gpf_body_is_subset(const gpf_body* inner, const gpf_body* outer,
                              int* out) {
  return Guard([&] {
    NotNull(inner, "inner");
    NotNull(outer, "outer");
    NotNull(out, "out");
    *out = gpf::IsSubset(inner->body, outer->body) ? 1 : 0;
  });
}

const char* gpf_body_digest(const gpf_body* body) {
  return body ? body->digest.c_str() : "";
}

void gpf_solver_config_init(gpf_solver_config* cfg) {
  if (cfg == nullptr) return;
  const gpf::SolverConfig d;
  cfg->p = d.p;
  cfg->delta = d.delta;
  cfg->tol = d.tol;
  cfg->stall_window = d.stall_window;
  cfg->max_iter = d.max_iter;
  cfg->inner_tol = d.inner_tol;
  cfg->residual_tol = d.residual_tol;
  cfg->init = static_cast<int>(d.init);
  cfg->seed = d.seed;
}

gpf_status gpf_solve(const gpf_body* body, double h,
                     const gpf_solver_config* cfg, gpf_eigen_info* info,
                     gpf_field** u_out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(info, "info");
    const gpf::SolverConfig c = ToConfig(cfg);
    gpf::EigenResult r = gpf::SolvePrincipal(Rasterized(body->body, h), c);
    info->lambda = r.lambda;
    info->weak_residual = r.weak_residual;
    info->strong_residual = r.strong_residual;
    info->convergence_slack = r.convergence_slack;
    info->iterations = r.iterations;
    info->fallback_steps = r.fallback_steps;
    info->interior_nodes = r.u.interior_count();
    if (u_out != nullptr) *u_out = new gpf_field{std::move(r.u)};
  });
}

gpf_status gpf_oracle_p2(const gpf_body* body, double h, double* lambda) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(lambda, "lambda");
    *lambda = gpf::DenseOracleP2(Rasterized(body->body, h)).lambda;
  });
}

gpf_status gpf_field_create(const gpf_grid_info* grid, const unsigned char* mask,
                            const double* values, gpf_field** out) {
  return Guard([&] {
    NotNull(grid, "grid");
    NotNull(mask, "mask");
    NotNull(out, "out");
    gpf::Grid g{{grid->origin_x, grid->origin_y}, grid->h, grid->nx, grid->ny};
    g.Validate();
    std::vector<std::uint8_t> m(mask, mask + g.size());
    std::vector<double> v;
    if (values != nullptr) v.assign(values, values + g.size());
    *out = new gpf_field{gpf::MaskedField(g, std::move(m), std::move(v))};
  });
}

gpf_status gpf_field_rasterize(const gpf_body* body, double h, gpf_field** out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    *out = new gpf_field{Rasterized(body->body, h)};
  });
}

void gpf_field_free(gpf_field* field) { delete field; }

gpf_status gpf_field_grid(const gpf_field* field, gpf_grid_info* out) {
  return Guard([&] {
    NotNull(field, "field");
    NotNull(out, "out");
    const gpf::Grid& g = field->field.grid();
    *out = {g.origin.x, g.origin.y, g.h, g.nx, g.ny};
  });
}

gpf_status gpf_field_values(const gpf_field* field, double* out, size_t n) {
  return Guard([&] {
    NotNull(field, "field");
    NotNull(out, "out");
    const auto v = field->field.values();
    for (size_t i = 0; i < n && i < v.size(); ++i) out[i] = v[i];
  });
}

gpf_status gpf_field_mask(const gpf_field* field, unsigned char* out, size_t n) {
  return Guard([&] {
    NotNull(field, "field");
    NotNull(out, "out");
    const auto m = field->field.mask();
    for (size_t i = 0; i < n && i < m.size(); ++i) out[i] = m[i];
  });
}

gpf_status gpf_field_rayleigh(const gpf_field* field, double p, double* out) {
  return Guard([&] {
    NotNull(field, "field");
    NotNull(out, "out");
    *out = gpf::RayleighQuotient(field->field, p);
  });
}

gpf_status gpf_field_write_csv(const gpf_field* field, const char* path) {
  return Guard([&] {
    NotNull(field, "field");
    NotNull(path, "path");
    std::ofstream f(path);
    if (!f) gpf::Fail(gpf::ErrorCode::kIo, std::string("cannot write ") + path);
    gpf::WriteFieldCsv(field->field, f);
    if (!f) gpf::Fail(gpf::ErrorCode::kIo, std::string("write failed: ") + path);
  });
}

gpf_status gpf_field_write_pgm(const gpf_field* field, const char* path) {
  return Guard([&] {
    NotNull(field, "field");
    NotNull(path, "path");
    gpf::WriteFieldPgm(field->field, path);
  });
}

double gpf_supconv_exponent(double p) {
  if (!(p > 1.0)) return std::numeric_limits<double>::quiet_NaN();
  return gpf::SupConvParams::ForExponent(p, 1.0).q;
}

gpf_status gpf_sup_convolution(const gpf_field* u, double epsilon, double q,
                               int fast, gpf_field** out) {
  return Guard([&] {
    NotNull(u, "u");
    NotNull(out, "out");
    const gpf::SupConvParams prm{.epsilon = epsilon, .q = q};
    *out = new gpf_field{fast ? gpf::SupConvolutionFast(u->field, prm)
                              : gpf::SupConvolution(u->field, prm)};
  });
}

gpf_status gpf_sup_combination(const gpf_field* u0, const gpf_field* u1,
                               const gpf_body* k0, const gpf_body* k1, double t,
                               int mode, const char* trace_csv, gpf_field** out,
                               size_t* empty_nodes) {
  return Guard([&] {
    NotNull(u0, "u0");
    NotNull(u1, "u1");
    NotNull(k0, "k0");
    NotNull(k1, "k1");
    NotNull(out, "out");
    gpf::Require(mode == GPF_COMBINE_INTERPOLATED || mode == GPF_COMBINE_NODE_PAIRS,
                 "unknown combination mode");
    const gpf::ConvexBody kt = gpf::MinkowskiCombination(k0->body, k1->body, t);
    const gpf::MaskedField target = Rasterized(kt, u0->field.grid().h);
    gpf::CombinationParams prm;
    prm.t = t;
    prm.mode = mode == GPF_COMBINE_INTERPOLATED
                   ? gpf::CombinationMode::kInterpolated
                   : gpf::CombinationMode::kNodePairs;
    gpf::CombinationResult r =
        gpf::SupCombination(u0->field, u1->field, target, prm);
    if (trace_csv != nullptr) {
      std::ofstream f(trace_csv);
      if (!f) gpf::Fail(gpf::ErrorCode::kIo, std::string("cannot write ") + trace_csv);
      gpf::WritePairTrace(r.pairs, f);
    }
    if (empty_nodes != nullptr) *empty_nodes = r.empty_nodes;
    *out = new gpf_field{std::move(r.u)};
  });
}

gpf_status gpf_tolerances_load(const char* path, gpf_tolerances* out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    const gpf::Tolerances t = gpf::Tolerances::Load(path);
    *out = {t.bm_relative,   t.urysohn_relative, t.monotone_relative,
            t.oracle_relative, t.semiconvexity,  t.subsolution_c,
            t.logconcavity_c};
  });
}

gpf_status gpf_check_solve(const gpf_body* body, double h,
                           const gpf_solver_config* cfg,
                           const gpf_tolerances* tol, int with_oracle,
                           gpf_report** out, gpf_field** u_out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    const gpf::SolverConfig c = ToConfig(cfg);
    const gpf::Tolerances t = ToTolerances(tol);
    const gpf::MaskedField mask = Rasterized(body->body, h);
    gpf::EigenResult r = gpf::SolvePrincipal(mask, c);
    std::optional<double> oracle;
    if (with_oracle) oracle = gpf::DenseOracleP2(mask).lambda;
    *out = NewReport(gpf::SolveReport(body->body, h, c, r, oracle, t));
    if (u_out != nullptr) *u_out = new gpf_field{std::move(r.u)};
  });
}

gpf_status gpf_check_bm(const gpf_body* k0, const gpf_body* k1, double t,
                        double h, const gpf_solver_config* cfg,
                        const gpf_tolerances* tol, gpf_report** out) {
  return Guard([&] {
    NotNull(k0, "k0");
    NotNull(k1, "k1");
    NotNull(out, "out");
    *out = NewReport(
        gpf::CheckBm(k0->body, k1->body, t, h, ToConfig(cfg), ToTolerances(tol)));
  });
}

gpf_status gpf_bm_report(const gpf_body* k0, const gpf_body* k1, double t,
                         double h, double p, double lambda0, double lambda1,
                         double lambda_t, const gpf_tolerances* tol,
                         gpf_report** out) {
  return Guard([&] {
    NotNull(k0, "k0");
    NotNull(k1, "k1");
    NotNull(out, "out");
    *out = NewReport(gpf::BmReport(k0->body, k1->body, t, h, p, lambda0, lambda1,
                                   lambda_t, ToTolerances(tol)));
  });
}

gpf_status gpf_check_subsolution(const gpf_field* u_t, double lambda_t, double p,
                                 double t, const char* bodies,
                                 const gpf_tolerances* tol, gpf_report** out) {
  return Guard([&] {
    NotNull(u_t, "u_t");
    NotNull(out, "out");
    std::optional<double> label_t;
    if (!std::isnan(t)) label_t = t;
    *out = NewReport(gpf::CheckSubsolutionQuotient(
        u_t->field, lambda_t, p, ToTolerances(tol), label_t,
        bodies ? bodies : ""));
  });
}

gpf_status gpf_check_logconcavity(const gpf_field* u, const gpf_tolerances* tol,
                                  int samples, uint64_t seed, gpf_report** out) {
  return Guard([&] {
    NotNull(u, "u");
    NotNull(out, "out");
    *out = NewReport(
        gpf::CheckLogConcavity(u->field, ToTolerances(tol), samples, seed));
  });
}

gpf_status gpf_check_urysohn(const gpf_body* body, double h,
                             const gpf_solver_config* cfg,
                             const gpf_tolerances* tol, int ball_vertices,
                             gpf_report** out) {
  return Guard([&] {
    NotNull(body, "body");
    NotNull(out, "out");
    *out = NewReport(gpf::CheckUrysohn(body->body, h, ToConfig(cfg),
                                       ToTolerances(tol), ball_vertices));
  });
}

gpf_status gpf_check_monotonicity(const gpf_body* inner, const gpf_body* outer,
                                  double h, const gpf_solver_config* cfg,
                                  const gpf_tolerances* tol, gpf_report** out) {
  return Guard([&] {
    NotNull(inner, "inner");
    NotNull(outer, "outer");
    NotNull(out, "out");
    *out = NewReport(gpf::CheckDomainMonotonicity(
        inner->body, outer->body, h, ToConfig(cfg), ToTolerances(tol)));
  });
}

gpf_status gpf_check_supconv(const gpf_field* u, double q,
                             const double* epsilons, size_t n,
                             const gpf_tolerances* tol, const char* label,
                             gpf_report_list** out) {
  return Guard([&] {
    NotNull(u, "u");
    NotNull(epsilons, "epsilons");
    NotNull(out, "out");
    std::vector<gpf::Report> reports = gpf::CheckSupConvolution(
        u->field, q, {epsilons, n}, ToTolerances(tol), label ? label : "");
    auto* list = new gpf_report_list;
    for (gpf::Report& r : reports) {
      gpf_report* rep = NewReport(std::move(r));
      list->reports.push_back(std::move(*rep));
      delete rep;
    }
    *out = list;
  });
}

gpf_status gpf_report_failed(const char* check, const char* bodies,
                             const char* error, gpf_report** out) {
  return Guard([&] {
    NotNull(check, "check");
    NotNull(out, "out");
    *out = NewReport(gpf::FailedReport(check, bodies ? bodies : "",
                                       error && *error ? error : "unknown error"));
  });
}

void gpf_report_free(gpf_report* report) { delete report; }

int gpf_report_pass(const gpf_report* report) {
  return report && report->report.pass ? 1 : 0;
}

double gpf_report_slack(const gpf_report* report) {
  return report ? report->report.slack : std::numeric_limits<double>::quiet_NaN();
}

double gpf_report_tolerance(const gpf_report* report) {
  return report ? report->report.tolerance
                : std::numeric_limits<double>::quiet_NaN();
}

const char* gpf_report_check(const gpf_report* report) {
  return report ? report->report.check.c_str() : "";
}

double gpf_report_value(const gpf_report* report, const char* key) {
  if (report == nullptr || key == nullptr) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  for (const auto& [k, v] : report->report.values) {
    if (k == key) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const char* gpf_report_json(const gpf_report* report) {
  return report ? report->json.c_str() : "";
}

const char* gpf_report_csv_row(const gpf_report* report) {
  return report ? report->csv.c_str() : "";
}

const char* gpf_report_csv_header(void) {
  static const std::string header = gpf::SummaryCsvHeader();
  return header.c_str();
}

size_t gpf_report_list_size(const gpf_report_list* list) {
  return list ? list->reports.size() : 0;
}

const gpf_report* gpf_report_list_get(const gpf_report_list* list, size_t i) {
  if (list == nullptr || i >= list->reports.size()) return nullptr;
  return &list->reports[i];
}

void gpf_report_list_free(gpf_report_list* list) { delete list; }

}  // extern "C"
