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

// Command-line front end over the C API.
//
//   gpf_cli --config run.json [--output-dir DIR] [--spacing H] [--p 1.5,2] ...
//
// Exit status: 0 all verdicts pass, 1 some verdict fails, 2 config error,
// 3 solver non-convergence.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gpf/gpf.h"
#include "json.hpp"

#ifndef GPF_DEFAULT_TOLERANCES
#define GPF_DEFAULT_TOLERANCES "tolerances.json"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void Bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using BodyPtr = std::unique_ptr<gpf_body, Deleter<gpf_body, gpf_body_free>>;
using FieldPtr = std::unique_ptr<gpf_field, Deleter<gpf_field, gpf_field_free>>;
using ReportPtr =
    std::unique_ptr<gpf_report, Deleter<gpf_report, gpf_report_free>>;
using ListPtr = std::unique_ptr<gpf_report_list,
                                Deleter<gpf_report_list, gpf_report_list_free>>;

// ---- config -------------------------------------------------------------

const std::vector<std::string> kCommands = {"solve",   "bm",      "logcc",
                                            "urysohn", "supconv", "monotone"};

struct RunConfig {
  std::string command;
  json bodies = json::object();
  std::vector<std::string> targets;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> p = {2.0};
  std::vector<double> t = {0.5};
  double h = 1.0 / 32;
  std::uint64_t seed = 42;
  gpf_solver_config solver{};
  std::string tolerances = GPF_DEFAULT_TOLERANCES;
  bool oracle = true;
  bool subsolution = true;
  int samples = 1000;
  int ball_vertices = 64;
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3};
  std::string output_dir = "gpf_out";
  bool fields = false;
  bool pgm = false;
};

const char* InitName(int init) {
  switch (init) {
    case GPF_INIT_ORACLE: return "oracle";
    case GPF_INIT_DISTANCE: return "distance";
    default: return "random";
  }
}

double Number(const json& j, const std::string& where) {
  if (!j.is_number()) Bad(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Bad(where, "must be finite");
  return v;
}

int Integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) Bad(where, "expected an integer");
  return j.get<int>();
}

bool Boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) Bad(where, "expected true or false");
  return j.get<bool>();
}

std::string String(const json& j, const std::string& where) {
  if (!j.is_string()) Bad(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> NumberList(const json& j, const std::string& where) {
  if (j.is_number()) return {Number(j, where)};
  if (!j.is_array() || j.empty()) Bad(where, "expected a non-empty list of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(Number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void OnlyKeys(const json& j, const std::string& where,
              std::initializer_list<const char*> keys) {
  if (!j.is_object()) Bad(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) Bad(where.empty() ? k : where + "." + k, "unknown key");
  }
}

// "line L, column C" for a byte offset into text.
std::string Position(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string msg = e.what();
    const size_t colon = msg.rfind(": ");
    throw ConfigError(path + ": " + Position(text, e.byte) + ": " +
                      (colon == std::string::npos ? msg : msg.substr(colon + 2)));
  }
}

RunConfig ReadConfig(const json& j, const fs::path& base) {
  RunConfig c;
  gpf_solver_config_init(&c.solver);
  OnlyKeys(j, "", {"command", "bodies", "targets", "pairs", "p", "t", "h",
                   "seed", "solver", "tolerances", "oracle", "subsolution",
                   "logcc", "urysohn", "supconv", "output"});
  if (!j.contains("command")) Bad("command", "missing");
  c.command = String(j["command"], "command");
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    Bad("command", "unknown command '" + c.command + "'");
  }
  if (!j.contains("bodies")) Bad("bodies", "missing");
  if (!j["bodies"].is_object() || j["bodies"].empty()) {
    Bad("bodies", "expected a non-empty object of named bodies");
  }
  c.bodies = j["bodies"];
  // Resolve file references against the config's directory now so that the
  // echoed config stays valid from anywhere.
  for (auto& [name, def] : c.bodies.items()) {
    if (def.is_object() && def.contains("file") && def["file"].is_string()) {
      const fs::path f = def["file"].get<std::string>();
      if (f.is_relative()) def["file"] = (base / f).lexically_normal().string();
    }
  }
  if (j.contains("targets")) {
    const json& ts = j["targets"];
    if (!ts.is_array()) Bad("targets", "expected a list of body names");
    for (size_t i = 0; i < ts.size(); ++i) {
      c.targets.push_back(String(ts[i], "targets[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("pairs")) {
    const json& ps = j["pairs"];
    if (!ps.is_array()) Bad("pairs", "expected a list of [name, name] pairs");
    for (size_t i = 0; i < ps.size(); ++i) {
      const std::string w = "pairs[" + std::to_string(i) + "]";
      if (!ps[i].is_array() || ps[i].size() != 2) Bad(w, "expected [name, name]");
      c.pairs.emplace_back(String(ps[i][0], w + "[0]"), String(ps[i][1], w + "[1]"));
    }
  }
  if (j.contains("p")) c.p = NumberList(j["p"], "p");
  if (j.contains("t")) c.t = NumberList(j["t"], "t");
  if (j.contains("h")) c.h = Number(j["h"], "h");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) Bad("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    OnlyKeys(s, "solver", {"delta", "tol", "stall_window", "max_iter",
                           "inner_tol", "residual_tol", "init"});
    if (s.contains("delta")) c.solver.delta = Number(s["delta"], "solver.delta");
    if (s.contains("tol")) c.solver.tol = Number(s["tol"], "solver.tol");
    if (s.contains("stall_window")) {
      c.solver.stall_window = Integer(s["stall_window"], "solver.stall_window");
    }
    if (s.contains("max_iter")) c.solver.max_iter = Integer(s["max_iter"], "solver.max_iter");
    if (s.contains("inner_tol")) c.solver.inner_tol = Number(s["inner_tol"], "solver.inner_tol");
    if (s.contains("residual_tol")) {
      c.solver.residual_tol = Number(s["residual_tol"], "solver.residual_tol");
    }
    if (s.contains("init")) {
      const std::string init = String(s["init"], "solver.init");
      if (init == "oracle") c.solver.init = GPF_INIT_ORACLE;
      else if (init == "distance") c.solver.init = GPF_INIT_DISTANCE;
      else if (init == "random") c.solver.init = GPF_INIT_RANDOM;
      else Bad("solver.init", "expected oracle, distance or random");
    }
  }
  if (j.contains("tolerances")) {
    const fs::path f = String(j["tolerances"], "tolerances");
    c.tolerances = f.is_relative() ? (base / f).lexically_normal().string() : f.string();
  }
  if (j.contains("oracle")) c.oracle = Boolean(j["oracle"], "oracle");
  if (j.contains("subsolution")) c.subsolution = Boolean(j["subsolution"], "subsolution");
  if (j.contains("logcc")) {
    OnlyKeys(j["logcc"], "logcc", {"samples"});
    if (j["logcc"].contains("samples")) {
      c.samples = Integer(j["logcc"]["samples"], "logcc.samples");
    }
  }
  if (j.contains("urysohn")) {
    OnlyKeys(j["urysohn"], "urysohn", {"ball_vertices"});
    if (j["urysohn"].contains("ball_vertices")) {
      c.ball_vertices = Integer(j["urysohn"]["ball_vertices"], "urysohn.ball_vertices");
    }
  }
  if (j.contains("supconv")) {
    OnlyKeys(j["supconv"], "supconv", {"epsilons"});
    if (j["supconv"].contains("epsilons")) {
      c.epsilons = NumberList(j["supconv"]["epsilons"], "supconv.epsilons");
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    OnlyKeys(o, "output", {"dir", "fields", "pgm"});
    if (o.contains("dir")) {
      const fs::path d = String(o["dir"], "output.dir");
      c.output_dir = d.is_relative() ? (base / d).lexically_normal().string() : d.string();
    }
    if (o.contains("fields")) c.fields = Boolean(o["fields"], "output.fields");
    if (o.contains("pgm")) c.pgm = Boolean(o["pgm"], "output.pgm");
  }
  return c;
}

void Validate(const RunConfig& c) {
  for (size_t i = 0; i < c.p.size(); ++i) {
    if (!(c.p[i] > 1.0)) Bad("p[" + std::to_string(i) + "]", "must be > 1");
  }
  for (size_t i = 0; i < c.t.size(); ++i) {
    if (!(c.t[i] >= 0.0 && c.t[i] <= 1.0)) {
      Bad("t[" + std::to_string(i) + "]", "must lie in [0, 1]");
    }
  }
  if (!(c.h > 0.0)) Bad("h", "must be > 0");
  if (c.samples < 10) Bad("logcc.samples", "must be at least 10");
  if (c.ball_vertices < 3) Bad("urysohn.ball_vertices", "must be at least 3");
  if (c.epsilons.size() < 2) Bad("supconv.epsilons", "need at least two values");
  for (size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > 0.0)) {
      Bad("supconv.epsilons[" + std::to_string(i) + "]", "must be > 0");
    }
  }
  const bool wants_pairs = c.command == "bm" || c.command == "monotone";
  if (wants_pairs && c.pairs.empty()) Bad("pairs", "command '" + c.command + "' needs pairs");
  if (!wants_pairs && c.targets.empty()) {
    Bad("targets", "command '" + c.command + "' needs targets");
  }
}

json EffectiveConfig(const RunConfig& c) {
  json pairs = json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back({a, b});
  return {
      {"command", c.command},
      {"bodies", c.bodies},
      {"targets", c.targets},
      {"pairs", pairs},
      {"p", c.p},
      {"t", c.t},
      {"h", c.h},
      {"seed", c.seed},
      {"solver",
       {{"delta", c.solver.delta},
        {"tol", c.solver.tol},
        {"stall_window", c.solver.stall_window},
        {"max_iter", c.solver.max_iter},
        {"inner_tol", c.solver.inner_tol},
        {"residual_tol", c.solver.residual_tol},
        {"init", InitName(c.solver.init)}}},
      {"tolerances", fs::absolute(c.tolerances).lexically_normal().string()},
      {"oracle", c.oracle},
      {"subsolution", c.subsolution},
      {"logcc", {{"samples", c.samples}}},
      {"urysohn", {{"ball_vertices", c.ball_vertices}}},
      {"supconv", {{"epsilons", c.epsilons}}},
      {"output",
       {{"dir", fs::absolute(c.output_dir).lexically_normal().string()},
        {"fields", c.fields},
        {"pgm", c.pgm}}},
  };
}

// ---- bodies -------------------------------------------------------------

class BodyTable {
 public:
  explicit BodyTable(const json& defs) : defs_(defs) {}

  const gpf_body* Get(const std::string& name, const std::string& where) {
    if (auto it = built_.find(name); it != built_.end()) return it->second.get();
    if (!defs_.contains(name)) Bad(where, "undefined body '" + name + "'");
    if (std::find(stack_.begin(), stack_.end(), name) != stack_.end()) {
      Bad("bodies." + name, "cyclic minkowski definition");
    }
    stack_.push_back(name);
    BodyPtr b = Build(defs_[name], "bodies." + name);
    stack_.pop_back();
    return built_.emplace(name, std::move(b)).first->second.get();
  }

 private:
  static void Check(gpf_status s, const std::string& where) {
    if (s != GPF_OK) Bad(where, gpf_last_error());
  }

  BodyPtr Build(const json& d, const std::string& where) {
    if (!d.is_object() || d.size() != 1) {
      Bad(where, "expected one of rectangle, regular_polygon, vertices, file, minkowski");
    }
    const std::string kind = d.begin().key();
    const json& v = d.begin().value();
    const std::string w = where + "." + kind;
    gpf_body* out = nullptr;
    if (kind == "rectangle") {
      const std::vector<double> r = NumberList(v, w);
      if (r.size() != 4) Bad(w, "expected [xmin, xmax, ymin, ymax]");
      Check(gpf_body_rectangle(r[0], r[1], r[2], r[3], &out), w);
    } else if (kind == "regular_polygon") {
      OnlyKeys(v, w, {"m", "radius", "center", "phase"});
      if (!v.contains("m")) Bad(w + ".m", "missing");
      const int m = Integer(v["m"], w + ".m");
      const double r = v.contains("radius") ? Number(v["radius"], w + ".radius") : 1.0;
      std::vector<double> c = {0.0, 0.0};
      if (v.contains("center")) c = NumberList(v["center"], w + ".center");
      if (c.size() != 2) Bad(w + ".center", "expected [x, y]");
      const double phase = v.contains("phase") ? Number(v["phase"], w + ".phase") : 0.0;
      Check(gpf_body_regular_polygon(m, r, c[0], c[1], phase, &out), w);
    } else if (kind == "vertices") {
      if (!v.is_array()) Bad(w, "expected a list of [x, y]");
      std::vector<double> xy;
      for (size_t i = 0; i < v.size(); ++i) {
        const std::string wi = w + "[" + std::to_string(i) + "]";
        const std::vector<double> pt = NumberList(v[i], wi);
        if (pt.size() != 2) Bad(wi, "expected [x, y]");
        xy.insert(xy.end(), pt.begin(), pt.end());
      }
      Check(gpf_body_from_vertices(xy.data(), xy.size() / 2, &out), w);
    } else if (kind == "file") {
      Check(gpf_body_read_file(String(v, w).c_str(), &out), w);
    } else if (kind == "minkowski") {
      OnlyKeys(v, w, {"k0", "k1", "t"});
      for (const char* key : {"k0", "k1", "t"}) {
        if (!v.contains(key)) Bad(w + "." + key, "missing");
      }
      const gpf_body* k0 = Get(String(v["k0"], w + ".k0"), w + ".k0");
      const gpf_body* k1 = Get(String(v["k1"], w + ".k1"), w + ".k1");
      Check(gpf_body_minkowski(k0, k1, Number(v["t"], w + ".t"), &out), w);
    } else {
      Bad(where, "unknown body kind '" + kind + "'");
    }
    return BodyPtr(out);
  }

  const json& defs_;
  std::map<std::string, BodyPtr> built_;
  std::vector<std::string> stack_;
};


// ---- work items ---------------------------------------------------------

// A finished report, serialized while its handle was alive.
struct Output {
  std::string stem;
  std::string json;
  std::string csv;
  bool pass = false;
};

struct ItemResult {
  std::vector<Output> outputs;
  bool not_converged = false;
  double seconds = 0.0;
};

struct Item {
  std::string label;
  std::string a, b;  // target, or (k0, k1) / (inner, outer)
  double p = 2.0;
};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string Sanitize(const std::string& s) {
  std::string out = s;
  for (char& ch : out) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  }
  return out;
}

void WriteAtomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Runner {
 public:
  Runner(const RunConfig& c, const gpf_tolerances& tol,
         std::map<std::string, const gpf_body*> bodies, fs::path out)
      : c_(c), tol_(tol), bodies_(std::move(bodies)), out_(std::move(out)) {
    solver_ = c.solver;
    solver_.seed = c.seed;
  }

  ItemResult Run(const Item& it) const {
    ItemResult r;
    const auto start = std::chrono::steady_clock::now();
    if (c_.command == "solve") Solve(it, r);
    else if (c_.command == "bm") Bm(it, r);
    else if (c_.command == "logcc") LogConcavity(it, r);
    else if (c_.command == "urysohn") Urysohn(it, r);
    else if (c_.command == "supconv") SupConv(it, r);
    else Monotone(it, r);
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

 private:
  gpf_solver_config Cfg(double p) const {
    gpf_solver_config cfg = solver_;
    cfg.p = p;
    return cfg;
  }

  static std::string Digests(std::initializer_list<const gpf_body*> bs) {
    std::string s;
    for (const gpf_body* b : bs) {
      if (!s.empty()) s += '+';
      s += gpf_body_digest(b);
    }
    return s;
  }

  static void Keep(ItemResult& r, std::string stem, const gpf_report* rep) {
    r.outputs.push_back({std::move(stem), gpf_report_json(rep),
                         gpf_report_csv_row(rep), gpf_report_pass(rep) != 0});
  }

  // Records a failed report for status s with the thread's last error.
  static void Fail(ItemResult& r, std::string stem, const char* check,
                   const std::string& digests, gpf_status s) {
    if (s == GPF_ERR_NOT_CONVERGED) r.not_converged = true;
    const std::string msg = std::string(gpf_status_name(s)) + ": " + gpf_last_error();
    gpf_report* rep = nullptr;
    if (gpf_report_failed(check, digests.c_str(), msg.c_str(), &rep) != GPF_OK) {
      throw std::runtime_error(gpf_last_error());
    }
    ReportPtr owned(rep);
    Keep(r, std::move(stem), rep);
  }

  static void Finish(ItemResult& r, std::string stem, const char* check,
                     const std::string& digests, gpf_status s, gpf_report* rep) {
    if (s != GPF_OK) return Fail(r, std::move(stem), check, digests, s);
    ReportPtr owned(rep);
    Keep(r, std::move(stem), rep);
  }

  void Dump(const gpf_field* u, const std::string& stem) const {
    const fs::path dir = out_ / "fields";
    if (c_.fields) gpf_field_write_csv(u, (dir / (stem + ".csv")).string().c_str());
    if (c_.pgm) gpf_field_write_pgm(u, (dir / (stem + ".pgm")).string().c_str());
  }

  FieldPtr SolveOrFail(const gpf_body* k, double p, ItemResult& r,
                       const std::string& stem, const char* check,
                       const std::string& digests, double* lambda) const {
    gpf_eigen_info info{};
    gpf_field* u = nullptr;
    const gpf_solver_config cfg = Cfg(p);
    const gpf_status s = gpf_solve(k, c_.h, &cfg, &info, &u);
    if (s != GPF_OK) {
      Fail(r, stem, check, digests, s);
      return nullptr;
    }
    *lambda = info.lambda;
    return FieldPtr(u);
  }

  void Solve(const Item& it, ItemResult& r) const {
    const gpf_body* k = bodies_.at(it.a);
    gpf_report* rep = nullptr;
    gpf_field* u = nullptr;
    const gpf_solver_config cfg = Cfg(it.p);
    const int oracle = c_.oracle && it.p == 2.0 ? 1 : 0;
    const gpf_status s = gpf_check_solve(k, c_.h, &cfg, &tol_, oracle, &rep, &u);
    FieldPtr field(u);
    Finish(r, it.label, "solve", Digests({k}), s, rep);
    if (field) Dump(field.get(), it.label + "_u");
  }

  void Bm(const Item& it, ItemResult& r) const {
    const gpf_body* k0 = bodies_.at(it.a);
    const gpf_body* k1 = bodies_.at(it.b);
    const std::string d01 = Digests({k0, k1});
    double lambda0 = 0.0, lambda1 = 0.0;
    FieldPtr u0 = SolveOrFail(k0, it.p, r, it.label + "_k0", "bm", d01, &lambda0);
    if (!u0) return;
    FieldPtr u1 = SolveOrFail(k1, it.p, r, it.label + "_k1", "bm", d01, &lambda1);
    if (!u1) return;
    Dump(u0.get(), it.label + "_u0");
    Dump(u1.get(), it.label + "_u1");
    for (double t : c_.t) {
      const std::string stem = it.label + "_t" + Num(t);
      gpf_body* kt_raw = nullptr;
      gpf_status s = gpf_body_minkowski(k0, k1, t, &kt_raw);
      if (s != GPF_OK) {
        Fail(r, stem, "bm", d01, s);
        continue;
      }
      BodyPtr kt(kt_raw);
      const std::string digests = Digests({k0, k1, kt.get()});
      double lambda_t = 0.0;
      FieldPtr ut = SolveOrFail(kt.get(), it.p, r, stem, "bm", digests, &lambda_t);
      if (!ut) continue;
      Dump(ut.get(), stem + "_ut");
      gpf_report* rep = nullptr;
      s = gpf_bm_report(k0, k1, t, c_.h, it.p, lambda0, lambda1, lambda_t, &tol_, &rep);
      Finish(r, stem, "bm", digests, s, rep);
      if (!c_.subsolution) continue;

      const std::string sub = stem + "_subsolution";
      std::string trace;
      if (c_.fields) trace = (out_ / "fields" / (sub + "_pairs.csv")).string();
      gpf_field* comb = nullptr;
      s = gpf_sup_combination(u0.get(), u1.get(), k0, k1, t, GPF_COMBINE_INTERPOLATED,
                              trace.empty() ? nullptr : trace.c_str(), &comb, nullptr);
      if (s != GPF_OK) {
        Fail(r, sub, "subsolution", digests, s);
        continue;
      }
      FieldPtr combined(comb);
      Dump(combined.get(), sub);
      rep = nullptr;
      const double rhs = (1.0 - t) * lambda0 + t * lambda1;
      s = gpf_check_subsolution(combined.get(), rhs, it.p, t, digests.c_str(), &tol_, &rep);
      Finish(r, sub, "subsolution", digests, s, rep);
    }
  }

  void LogConcavity(const Item& it, ItemResult& r) const {
    const gpf_body* k = bodies_.at(it.a);
    const std::string d = Digests({k});
    double lambda = 0.0;
    FieldPtr u = SolveOrFail(k, it.p, r, it.label, "logconcavity", d, &lambda);
    if (!u) return;
    Dump(u.get(), it.label + "_u");
    gpf_report* rep = nullptr;
    const gpf_status s =
        gpf_check_logconcavity(u.get(), &tol_, c_.samples, c_.seed, &rep);
    Finish(r, it.label, "logconcavity", d, s, rep);
  }

  void Urysohn(const Item& it, ItemResult& r) const {
    const gpf_body* k = bodies_.at(it.a);
    gpf_report* rep = nullptr;
    const gpf_solver_config cfg = Cfg(it.p);
    const gpf_status s = gpf_check_urysohn(k, c_.h, &cfg, &tol_, c_.ball_vertices, &rep);
    Finish(r, it.label, "urysohn", Digests({k}), s, rep);
  }

  void SupConv(const Item& it, ItemResult& r) const {
    const gpf_body* k = bodies_.at(it.a);
    const std::string d = Digests({k});
    double lambda = 0.0;
    FieldPtr u = SolveOrFail(k, it.p, r, it.label, "supconv", d, &lambda);
    if (!u) return;
    Dump(u.get(), it.label + "_u");
    gpf_report_list* list = nullptr;
    const gpf_status s =
        gpf_check_supconv(u.get(), gpf_supconv_exponent(it.p), c_.epsilons.data(),
                          c_.epsilons.size(), &tol_, d.c_str(), &list);
    if (s != GPF_OK) return Fail(r, it.label, "supconv", d, s);
    ListPtr owned(list);
    for (size_t i = 0; i < gpf_report_list_size(list); ++i) {
      const gpf_report* rep = gpf_report_list_get(list, i);
      Keep(r, it.label + "_" + gpf_report_check(rep), rep);
    }
  }

  void Monotone(const Item& it, ItemResult& r) const {
    const gpf_body* inner = bodies_.at(it.a);
    const gpf_body* outer = bodies_.at(it.b);
    gpf_report* rep = nullptr;
    const gpf_solver_config cfg = Cfg(it.p);
    const gpf_status s = gpf_check_monotonicity(inner, outer, c_.h, &cfg, &tol_, &rep);
    Finish(r, it.label, "monotonicity", Digests({inner, outer}), s, rep);
  }

  const RunConfig& c_;
  gpf_tolerances tol_;
  gpf_solver_config solver_;
  std::map<std::string, const gpf_body*> bodies_;
  fs::path out_;
};

std::vector<Item> MakeItems(const RunConfig& c) {
  std::vector<Item> items;
  for (double p : c.p) {
    if (c.command == "bm" || c.command == "monotone") {
      for (const auto& [a, b] : c.pairs) {
        items.push_back({c.command + "_" + Sanitize(a) + "__" + Sanitize(b) + "_p" + Num(p),
                         a, b, p});
      }
    } else {
      for (const std::string& a : c.targets) {
        items.push_back({c.command + "_" + Sanitize(a) + "_p" + Num(p), a, "", p});
      }
    }
  }
  return items;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian principal frequency checks"};
  std::string config_path;
  std::string output_dir;
  std::string tolerances;
  std::vector<double> p_list, t_list;
  double h = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool fields = false, pgm = false;
  app.add_option("-c,--config", config_path, "JSON run configuration")->required();
  app.add_option("-o,--output-dir", output_dir,
                 "output directory (overrides GPF_OUTPUT_DIR and output.dir)");
  app.add_option("--tolerances", tolerances, "tolerances file");
  app.add_option("--p", p_list, "exponents")->delimiter(',');
  app.add_option("--t", t_list, "interpolation parameters")->delimiter(',');
  auto* h_opt = app.add_option("--spacing", h, "grid spacing h");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("-j,--jobs", jobs, "parallel work items")->check(CLI::PositiveNumber);
  auto* fields_opt = app.add_flag("--fields", fields, "write field CSV dumps");
  auto* pgm_opt = app.add_flag("--pgm", pgm, "write PGM heatmaps");
  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  std::vector<BodyPtr> keep;
  std::map<std::string, const gpf_body*> used;
  gpf_tolerances tol{};
  std::unique_ptr<BodyTable> table;
  json config_json;
  try {
    config_json = ParseFile(config_path);
    cfg = ReadConfig(config_json, fs::path(config_path).parent_path());
    if (const char* env = std::getenv("GPF_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (!tolerances.empty()) cfg.tolerances = tolerances;
    if (!p_list.empty()) cfg.p = p_list;
    if (!t_list.empty()) cfg.t = t_list;
    if (*h_opt) cfg.h = h;
    if (*seed_opt) cfg.seed = seed;
    if (*fields_opt) cfg.fields = fields;
    if (*pgm_opt) cfg.pgm = pgm;
    Validate(cfg);

    table = std::make_unique<BodyTable>(cfg.bodies);
    if (cfg.command == "bm" || cfg.command == "monotone") {
      for (size_t i = 0; i < cfg.pairs.size(); ++i) {
        const std::string w = "pairs[" + std::to_string(i) + "]";
        used[cfg.pairs[i].first] = table->Get(cfg.pairs[i].first, w + "[0]");
        used[cfg.pairs[i].second] = table->Get(cfg.pairs[i].second, w + "[1]");
      }
    } else {
      for (size_t i = 0; i < cfg.targets.size(); ++i) {
        used[cfg.targets[i]] =
            table->Get(cfg.targets[i], "targets[" + std::to_string(i) + "]");
      }
    }
    if (gpf_tolerances_load(cfg.tolerances.c_str(), &tol) != GPF_OK) {
      Bad("tolerances", gpf_last_error());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const fs::path out = cfg.output_dir;
  try {
    // reports/ and fields/ belong to the tool; stale items would otherwise
    // survive a rerun with a smaller matrix.
    fs::remove_all(out / "reports");
    fs::remove_all(out / "fields");
    fs::create_directories(out / "reports");
    if (cfg.fields || cfg.pgm) fs::create_directories(out / "fields");
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: output.dir: " << e.what() << "\n";
    return kExitConfig;
  }

  const std::string started = UtcNow();
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Item> items = MakeItems(cfg);
  std::vector<ItemResult> results(items.size());
  const Runner runner(cfg, tol, used, out);
  std::atomic<size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (size_t i = next++; i < items.size(); i = next++) {
      results[i] = runner.Run(items[i]);
      std::lock_guard<std::mutex> lock(log_mu);
      for (const Output& o : results[i].outputs) {
        std::cerr << (o.pass ? "PASS " : "FAIL ") << o.stem << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(std::max<size_t>(1, items.size())));
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  // Single writer: reports and the summary are written in item order.
  std::string summary = gpf_report_csv_header();
  json steps = json::array();
  bool all_pass = true, not_converged = false;
  size_t seq = 0;
  try {
    for (size_t i = 0; i < items.size(); ++i) {
      json names = json::array();
      for (const Output& o : results[i].outputs) {
        char prefix[16];
        std::snprintf(prefix, sizeof prefix, "%04zu_", seq++);
        const std::string file = "reports/" + std::string(prefix) + o.stem + ".json";
        WriteAtomic(out / file, o.json);
        summary += o.csv;
        all_pass = all_pass && o.pass;
        names.push_back(file);
      }
      not_converged = not_converged || results[i].not_converged;
      steps.push_back({{"item", items[i].label},
                       {"seconds", results[i].seconds},
                       {"reports", names}});
    }
    WriteAtomic(out / "summary.csv", summary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }

  const int status = not_converged ? kExitNotConverged : all_pass ? kExitPass : kExitFail;
  json tol_json = {{"bm_relative", tol.bm_relative},
                   {"urysohn_relative", tol.urysohn_relative},
                   {"monotone_relative", tol.monotone_relative},
                   {"oracle_relative", tol.oracle_relative},
                   {"semiconvexity", tol.semiconvexity},
                   {"subsolution_c", tol.subsolution_c},
                   {"logconcavity_c", tol.logconcavity_c}};
  json argv_json = json::array();
  for (int i = 0; i < argc; ++i) argv_json.push_back(argv[i]);
  const json effective = EffectiveConfig(cfg);
  json manifest = {
      {"tool", "gpf_cli"},
      {"version", gpf_version()},
      {"argv", argv_json},
      {"config", effective},
      {"tolerance_values", tol_json},
      {"jobs", jobs},
      {"started", started},
      {"finished", UtcNow()},
      {"total_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
      {"steps", steps},
      {"exit_status", status},
  };
  try {
    // config.json reruns the exact same matrix: gpf_cli --config config.json
    WriteAtomic(out / "config.json", effective.dump(2) + "\n");
    WriteAtomic(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  std::cout << (status == kExitPass ? "all checks passed" : "some checks failed")
            << " (" << seq << " reports in " << out.string() << ")\n";
  return status;
}
