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

/*
 * C interface of the gpf library.
 *
 * Conventions
 *   - Every fallible call returns gpf_status. On failure, gpf_last_error()
 *     returns a message for the calling thread until its next failing call.
 *   - Objects are opaque handles. A function that returns a handle through
 *     an out-pointer transfers ownership; release it with the matching
 *     *_free function. Free functions accept NULL.
 *   - Handles are immutable after creation and may be shared across threads.
 *   - Returned strings are owned by the handle they came from and live as
 *     long as it does.
 */

#ifndef GPF_GPF_H_
#define GPF_GPF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GPF_API __declspec(dllexport)
#else
#define GPF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gpf_status {
  GPF_OK = 0,
  GPF_ERR_INVALID_ARGUMENT = 1,
  GPF_ERR_DEGENERATE = 2,
  GPF_ERR_NOT_CONVERGED = 3,
  GPF_ERR_IO = 4,
  GPF_ERR_INTERNAL = 5
} gpf_status;

typedef struct gpf_body gpf_body;
typedef struct gpf_field gpf_field;
typedef struct gpf_report gpf_report;
typedef struct gpf_report_list gpf_report_list;

GPF_API const char* gpf_version(void);
GPF_API const char* gpf_last_error(void);
GPF_API const char* gpf_status_name(gpf_status status);

/* ---- bodies ---------------------------------------------------------- */

/* xy holds n (x, y) pairs, counterclockwise. */
GPF_API gpf_status gpf_body_from_vertices(const double* xy, size_t n,
                                          gpf_body** out);
GPF_API gpf_status gpf_body_rectangle(double xmin, double xmax, double ymin,
                                      double ymax, gpf_body** out);
GPF_API gpf_status gpf_body_regular_polygon(int m, double circumradius,
                                            double cx, double cy, double phase,
                                            gpf_body** out);
/* Plain-text vertex list, one "x y" pair per line. */
GPF_API gpf_status gpf_body_read_file(const char* path, gpf_body** out);
GPF_API gpf_status gpf_body_minkowski(const gpf_body* k0, const gpf_body* k1,
                                      double t, gpf_body** out);
GPF_API gpf_status gpf_body_matching_ball(const gpf_body* k, int m,
                                          gpf_body** out);
GPF_API void gpf_body_free(gpf_body* body);

GPF_API size_t gpf_body_vertex_count(const gpf_body* body);
/* Copies min(n, count) vertices into xy (2 doubles each). */
GPF_API gpf_status gpf_body_vertices(const gpf_body* body, double* xy,
                                     size_t n);
GPF_API gpf_status gpf_body_support(const gpf_body* body, double yx, double yy,
                                    double* out);
GPF_API gpf_status gpf_body_width(const gpf_body* body, double yx, double yy,
                                  double* out);
GPF_API gpf_status gpf_body_mean_width(const gpf_body* body, double* out);
GPF_API gpf_status gpf_body_contains(const gpf_body* body, double x, double y,
                                     int* out);
GPF_API gpf_status gpf_body_is_subset(const gpf_body* inner,
                                      const gpf_body* outer, int* out);
/* 16 lowercase hex digits of the vertex digest, owned by the body. */
GPF_API const char* gpf_body_digest(const gpf_body* body);

/* ---- solver ---------------------------------------------------------- */

typedef enum gpf_init {
  GPF_INIT_ORACLE = 0,
  GPF_INIT_DISTANCE = 1,
  GPF_INIT_RANDOM = 2
} gpf_init;

typedef struct gpf_solver_config {
  double p;
  double delta; /* negative: 1e-8 for p < 2, else 0 */
  double tol;
  int stall_window;
  int max_iter;
  double inner_tol;
  double residual_tol;
  int init; /* gpf_init */
  uint64_t seed;
} gpf_solver_config;

GPF_API void gpf_solver_config_init(gpf_solver_config* cfg);

typedef struct gpf_eigen_info {
  double lambda;
  double weak_residual;
  double strong_residual;
  double convergence_slack;
  int iterations;
  int fallback_steps;
  size_t interior_nodes;
} gpf_eigen_info;

/* Principal frequency on the lattice-aligned grid of spacing h covering the
 * body. u_out may be NULL. */
GPF_API gpf_status gpf_solve(const gpf_body* body, double h,
                             const gpf_solver_config* cfg,
                             gpf_eigen_info* info, gpf_field** u_out);
/* p = 2 dense oracle on the same grid. */
GPF_API gpf_status gpf_oracle_p2(const gpf_body* body, double h,
                                 double* lambda);

/* ---- fields ---------------------------------------------------------- */

typedef struct gpf_grid_info {
  double origin_x;
  double origin_y;
  double h;
  int nx;
  int ny;
} gpf_grid_info;

/* mask and values hold nx * ny entries, x fastest. values may be NULL. */
GPF_API gpf_status gpf_field_create(const gpf_grid_info* grid,
                                    const unsigned char* mask,
                                    const double* values, gpf_field** out);
/* Mask of the body on its covering grid of spacing h, values 0. */
GPF_API gpf_status gpf_field_rasterize(const gpf_body* body, double h,
                                       gpf_field** out);
GPF_API void gpf_field_free(gpf_field* field);

GPF_API gpf_status gpf_field_grid(const gpf_field* field, gpf_grid_info* out);
GPF_API gpf_status gpf_field_values(const gpf_field* field, double* out,
                                    size_t n);
GPF_API gpf_status gpf_field_mask(const gpf_field* field, unsigned char* out,
                                  size_t n);
GPF_API gpf_status gpf_field_rayleigh(const gpf_field* field, double p,
                                      double* out);
GPF_API gpf_status gpf_field_write_csv(const gpf_field* field,
                                       const char* path);
/* Also writes path + ".json" with the value scaling. */
GPF_API gpf_status gpf_field_write_pgm(const gpf_field* field,
                                       const char* path);

/* q = max(2, p / (p - 1)). */
GPF_API double gpf_supconv_exponent(double p);
/* fast != 0 selects the windowed path (bitwise identical values). */
GPF_API gpf_status gpf_sup_convolution(const gpf_field* u, double epsilon,
                                       double q, int fast, gpf_field** out);

typedef enum gpf_combination_mode {
  GPF_COMBINE_INTERPOLATED = 0,
  GPF_COMBINE_NODE_PAIRS = 1
} gpf_combination_mode;

/* u_t on the rasterized (1 - t) k0 + t k1 at the fields' spacing. When
 * trace_csv is not NULL the optimal pairs are written there. empty_nodes
 * may be NULL. */
GPF_API gpf_status gpf_sup_combination(const gpf_field* u0,
                                       const gpf_field* u1, const gpf_body* k0,
                                       const gpf_body* k1, double t, int mode,
                                       const char* trace_csv, gpf_field** out,
                                       size_t* empty_nodes);

/* ---- checks ---------------------------------------------------------- */

typedef struct gpf_tolerances {
  double bm_relative;
  double urysohn_relative;
  double monotone_relative;
  double oracle_relative;
  double semiconvexity;
  double subsolution_c;
  double logconcavity_c;
} gpf_tolerances;

GPF_API gpf_status gpf_tolerances_load(const char* path, gpf_tolerances* out);

/* Solve report; compares with the p = 2 oracle when with_oracle != 0. */
GPF_API gpf_status gpf_check_solve(const gpf_body* body, double h,
                                   const gpf_solver_config* cfg,
                                   const gpf_tolerances* tol, int with_oracle,
                                   gpf_report** out, gpf_field** u_out);
GPF_API gpf_status gpf_check_bm(const gpf_body* k0, const gpf_body* k1,
                                double t, double h,
                                const gpf_solver_config* cfg,
                                const gpf_tolerances* tol, gpf_report** out);
/* From eigenvalues already computed at spacing h. */
GPF_API gpf_status gpf_bm_report(const gpf_body* k0, const gpf_body* k1,
                                 double t, double h, double p, double lambda0,
                                 double lambda1, double lambda_t,
                                 const gpf_tolerances* tol, gpf_report** out);
/* t (NAN for none) and bodies (may be NULL) only label the report. */
GPF_API gpf_status gpf_check_subsolution(const gpf_field* u_t,
                                         double lambda_t, double p, double t,
                                         const char* bodies,
                                         const gpf_tolerances* tol,
                                         gpf_report** out);
GPF_API gpf_status gpf_check_logconcavity(const gpf_field* u,
                                          const gpf_tolerances* tol,
                                          int samples, uint64_t seed,
                                          gpf_report** out);
GPF_API gpf_status gpf_check_urysohn(const gpf_body* body, double h,
                                     const gpf_solver_config* cfg,
                                     const gpf_tolerances* tol,
                                     int ball_vertices, gpf_report** out);
GPF_API gpf_status gpf_check_monotonicity(const gpf_body* inner,
                                          const gpf_body* outer, double h,
                                          const gpf_solver_config* cfg,
                                          const gpf_tolerances* tol,
                                          gpf_report** out);
GPF_API gpf_status gpf_check_supconv(const gpf_field* u, double q,
                                     const double* epsilons, size_t n,
                                     const gpf_tolerances* tol,
                                     const char* label, gpf_report_list** out);

/* A failed report for a check that could not run. */
GPF_API gpf_status gpf_report_failed(const char* check, const char* bodies,
                                     const char* error, gpf_report** out);
GPF_API void gpf_report_free(gpf_report* report);
GPF_API int gpf_report_pass(const gpf_report* report);
GPF_API double gpf_report_slack(const gpf_report* report);
GPF_API double gpf_report_tolerance(const gpf_report* report);
GPF_API const char* gpf_report_check(const gpf_report* report);
/* NAN if the report has no such value. */
GPF_API double gpf_report_value(const gpf_report* report, const char* key);
GPF_API const char* gpf_report_json(const gpf_report* report);
GPF_API const char* gpf_report_csv_row(const gpf_report* report);
GPF_API const char* gpf_report_csv_header(void);

GPF_API size_t gpf_report_list_size(const gpf_report_list* list);
/* Borrowed; valid while the list lives. */
GPF_API const gpf_report* gpf_report_list_get(const gpf_report_list* list,
                                              size_t i);
GPF_API void gpf_report_list_free(gpf_report_list* list);

#ifdef __cplusplus
}
#endif

#endif /* GPF_GPF_H_ */
