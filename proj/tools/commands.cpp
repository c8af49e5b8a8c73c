#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cat0lab/convexity.hpp"
#include "cat0lab/geodesic.hpp"
#include "cat0lab/io.hpp"
#include "cat0lab/mappings.hpp"
#include "cat0lab/qt_dynamics.hpp"
#include "cat0lab/sampling.hpp"
#include "cat0lab/scheme.hpp"

namespace cat0lab::cli {
namespace {

using io::ConfigError;
using io::Json;
namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 42;

// Raw flag values; only the ones actually given are copied into the config.
struct Flags {
  std::string space;
  std::vector<std::string> checks;
  std::vector<std::string> p;
  long long samples = 0;
  long long tuples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::string config;
  std::string out;
  double ks = 0.0;
  double kt = 0.0;
  std::vector<double> t;
  long long steps = 0;
  double epsilon = 0.0;
  double radius = 0.0;
  long long n = 0;
  long long m = 0;
  double theta = 0.0;
  std::vector<std::string> strict;
};

void add_options(CLI::App& app, Flags& f) {
  app.add_option("--space", f.space, "euclidean:N | disk | tree:star3 | tree:path4 | tree:<file>");
  app.add_option("--check", f.checks, "check names (comma separated)")->delimiter(',');
  app.add_option("--p", f.p, "convexity orders (comma separated, 'inf' allowed)")->delimiter(',');
  app.add_option("--samples", f.samples, "samples per audit");
  app.add_option("--tuples", f.tuples, "random tuples for bound checks");
  app.add_option("--seed", f.seed, "RNG seed (default: $CAT0LAB_SEED or 42)");
  app.add_option("--tol", f.tol, "violation tolerance");
  app.add_option("--config", f.config, "JSON run configuration");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--ks", f.ks, "Lipschitz constant of S");
  app.add_option("--kt", f.kt, "Lipschitz constant of T");
  app.add_option("--t", f.t, "blend weights (comma separated)")->delimiter(',');
  app.add_option("--steps", f.steps, "scheme steps");
  app.add_option("--epsilon", f.epsilon, "separation for the uniform-convexity modulus");
  app.add_option("--radius", f.radius, "radius for the uniform-convexity modulus");
  app.add_option("--n", f.n, "iteration count for bound checks");
  app.add_option("--m", f.m, "second index for slice and product bounds");
  app.add_option("--theta", f.theta, "theta bound for blend suggestion");
  app.add_option("--strict", f.strict, "maps required to be strict contractions (S,T)")
      ->delimiter(',');
}

template <typename T>
void overlay(const CLI::App& sub, Json& cfg, const char* flag, const char* key, const T& value) {
  if (sub.count(flag) > 0) cfg[key] = value;
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json doc;
  try {
    in >> doc;
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config '" + path + "' must be a JSON object");
  return doc;
}

std::uint64_t env_seed() {
  const char* v = std::getenv("CAT0LAB_SEED");
  if (v == nullptr || *v == '\0') return kDefaultSeed;
  const std::string s(v);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("CAT0LAB_SEED is not an unsigned integer: '" + s + "'");
  return seed;
}

// Typed config accessors; type mismatches become ConfigError.
double number_or(const Json& cfg, const char* key, double def) {
  if (!cfg.contains(key)) return def;
  if (!cfg.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return cfg.at(key).get<double>();
}

std::size_t count_or(const Json& cfg, const char* key, std::size_t def) {
  if (!cfg.contains(key)) return def;
  const Json& v = cfg.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::vector<double> numbers_or(const Json& cfg, const char* key, std::vector<double> def) {
  if (!cfg.contains(key)) return def;
  const Json& v = cfg.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be a number or list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> strings_or(const Json& cfg, const char* key,
                                    std::vector<std::string> def) {
  if (!cfg.contains(key)) return def;
  const Json& v = cfg.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be a string or list");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw ConfigError(std::string("'") + key + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::vector<ConvexityOrder> orders(const Json& cfg) {
  std::vector<ConvexityOrder> out;
  if (!cfg.contains("p")) return {ConvexityOrder(2.0)};
  Json list = cfg.at("p").is_array() ? cfg.at("p") : Json::array({cfg.at("p")});
  for (const auto& v : list) {
    if (v.is_number()) {
      out.emplace_back(v.get<double>());
    } else if (v.is_string() && (v == "inf" || v == "infinity")) {
      out.push_back(ConvexityOrder::infinity());
    } else if (v.is_string()) {
      const std::string s = v.get<std::string>();
      char* end = nullptr;
      const double p = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0') throw ConfigError("invalid p '" + s + "'");
      out.emplace_back(p);
    } else {
      throw ConfigError("p must be a number or 'inf'");
    }
  }
  if (out.empty()) throw ConfigError("p list is empty");
  return out;
}

Json base_point_json(const SpaceModel& space) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return Json(std::vector<double>(space.dimension(), 0.0));
    case SpaceKind::disk:
      return Json::array({0.0, 0.0});
    case SpaceKind::tree:
      return Json{{"node", space.tree().node_name(0)}};
  }
  return Json();
}

// A map with Lipschitz constant k about the base point: a geodesic
// contraction for k <= 1, a scaling for k > 1 (Euclidean only).
Json constant_map_json(const SpaceModel& space, double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("Lipschitz constants must be >= 0");
  if (k <= 1.0) return Json{{"kind", "contraction"}, {"anchor", base_point_json(space)}, {"factor", k}};
  if (space.kind() != SpaceKind::euclidean)
    throw ConfigError("constants above 1 are only available on Euclidean spaces");
  const std::size_t n = space.dimension();
  Json rows = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = k;
    rows.push_back(row);
  }
  return Json{{"kind", "affine"}, {"matrix", rows}, {"offset", std::vector<double>(n, 0.0)}};
}

struct Context {
  Json cfg;
  SpaceModel space;
  std::uint64_t seed;
  std::string digest;
  std::optional<fs::path> out_dir;
  double tol;

  LipschitzMap map(const char* key) const {
    if (!cfg.contains(key)) return LipschitzMap::identity();
    return io::map_from_json(space, cfg.at(key));
  }
  bool has_map(const char* key) const { return cfg.contains(key); }

  Point point_or(const char* key, const Point& def) const {
    return cfg.contains(key) ? io::point_from_json(space, cfg.at(key)) : def;
  }

  Json stamp(Json doc) const {
    doc["config_digest"] = digest;
    doc["seed"] = seed;
    return doc;
  }

  void write(const std::string& name, const std::string& content) const {
    if (!out_dir) return;
    std::ofstream f(*out_dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (*out_dir / name).string() + "'");
    f << content;
  }
};

AuditSpec audit_spec(const Context& ctx, ConvexityOrder p) {
  AuditSpec spec;
  spec.p = p;
  spec.sample_count = count_or(ctx.cfg, "samples", 10000);
  spec.seed = ctx.seed;
  spec.tol = ctx.tol;
  spec.validate();
  return spec;
}

Json modulus_json(const SpaceModel& space, const ModulusEstimate& est, double tol) {
  Json witness = est.witness.points.empty() ? Json(nullptr) : io::sample_to_json(space, est.witness);
  return Json{{"check", "uc_modulus"},
              {"space", space.name()},
              {"samples", est.admissible},
              {"worst_residual", nullptr},
              {"tol", tol},
              {"passed", est.status == AuditStatus::passed},
              {"status", to_string(est.status)},
              {"witness", witness},
              {"details",
               {{"epsilon", est.probe.epsilon},
                {"r", est.probe.r},
                {"delta_hat", est.probe.estimated_delta},
                {"delta_p", est.delta_p},
                {"sup_ratio", est.sup_ratio}}}};
}

Json lipschitz_json(const SpaceModel& space, const char* which, const LipschitzEstimate& est,
                    double tol) {
  Json witness = est.witness.points.empty() ? Json(nullptr) : io::sample_to_json(space, est.witness);
  return Json{{"check", std::string("lipschitz:") + which},
              {"space", space.name()},
              {"samples", est.pairs},
              {"worst_residual", est.declared_k - est.k_hat},
              {"tol", tol},
              {"passed", est.passed()},
              {"status", to_string(est.status)},
              {"witness", witness},
              {"details", {{"k_hat", est.k_hat}, {"declared_k", est.declared_k}}}};
}

std::optional<Implication> implication_kind(const std::string& s) {
  for (auto k : {Implication::midpoint_implies_1convex,
                 Implication::busemann_midpoint_implies_pconvex, Implication::uc_implies_uc_p})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

int cmd_audit(const Context& ctx, std::ostream& out) {
  const auto checks = strings_or(ctx.cfg, "check", {});
  if (checks.empty()) throw ConfigError("audit needs at least one --check");
  static const std::vector<std::string> known{
      "p_convexity", "midpoint_pair", "busemann", "busemann_min", "convex_structure",
      "uc_modulus",  "cat0",          "implication", "metric_axioms", "lipschitz"};
  for (const auto& c : checks)
    if (std::find(known.begin(), known.end(), c) == known.end())
      throw ConfigError("unknown check '" + c + "'");
  const auto ps = orders(ctx.cfg);
  ModulusProbe probe;
  probe.epsilon = number_or(ctx.cfg, "epsilon", 1.0);
  probe.r = number_or(ctx.cfg, "radius", 1.0);

  // Resolve every input before running anything so config errors exit early.
  std::vector<Implication> implications;
  for (const auto& s : strings_or(ctx.cfg, "implication",
                                  {"midpoint_implies_1convex", "busemann_midpoint_implies_pconvex",
                                   "uc_implies_uc_p"})) {
    const auto k = implication_kind(s);
    if (!k) throw ConfigError("unknown implication '" + s + "'");
    implications.push_back(*k);
  }
  std::vector<std::pair<const char*, LipschitzMap>> lip_maps;
  if (std::find(checks.begin(), checks.end(), "lipschitz") != checks.end()) {
    for (const char* key : {"S", "T"})
      if (ctx.has_map(key)) lip_maps.emplace_back(key, ctx.map(key));
    if (lip_maps.empty()) throw ConfigError("the lipschitz check needs S or T (or --ks/--kt)");
  }

  Json reports = Json::array();
  bool all_passed = true;
  auto add = [&](Json r, const std::string& file) {
    r = ctx.stamp(std::move(r));
    all_passed = all_passed && r.at("passed").get<bool>();
    ctx.write(file + ".json", r.dump(2) + "\n");
    reports.push_back(std::move(r));
  };
  auto suffix = [&](ConvexityOrder p) { return ps.size() > 1 ? "_p" + p.to_string() : std::string(); };

  for (const auto& c : checks) {
    if (c == "cat0") {
      add(io::report_to_json(ctx.space, check_cat0(ctx.space, audit_spec(ctx, ConvexityOrder(2.0)))), c);
    } else if (c == "convex_structure") {
      add(io::report_to_json(ctx.space,
                             check_convex_structure(ctx.space, audit_spec(ctx, ConvexityOrder(1.0)))),
          c);
    } else if (c == "metric_axioms") {
      auto r = audit_metric_axioms(ctx.space, count_or(ctx.cfg, "samples", 10000), ctx.seed);
      add(io::report_to_json(ctx.space, r), c);
    } else if (c == "lipschitz") {
      for (const auto& [key, m] : lip_maps) {
        const auto est = estimate_lipschitz(ctx.space, m, audit_spec(ctx, ConvexityOrder(1.0)));
        add(lipschitz_json(ctx.space, key, est, ctx.tol), c + "_" + key);
      }
    } else if (c == "implication") {
      for (auto k : implications)
        for (auto p : ps)
          add(io::report_to_json(ctx.space, check_implication(ctx.space, k, audit_spec(ctx, p), probe)),
              c + "_" + to_string(k) + suffix(p));
    } else {
      for (auto p : ps) {
        const AuditSpec spec = audit_spec(ctx, p);
        if (c == "p_convexity") {
          add(io::report_to_json(ctx.space, check_p_convexity(ctx.space, spec)), c + suffix(p));
        } else if (c == "midpoint_pair") {
          add(io::report_to_json(ctx.space, check_midpoint_pair_bound(ctx.space, spec)), c + suffix(p));
        } else if (c == "busemann" || c == "busemann_min") {
          add(io::report_to_json(ctx.space, check_busemann(ctx.space, spec, c == "busemann_min")),
              c + suffix(p));
        } else if (c == "uc_modulus") {
          add(modulus_json(ctx.space, estimate_uc_modulus(ctx.space, probe, p, spec), ctx.tol),
              c + suffix(p));
        }
      }
    }
  }
  out << ctx.stamp(Json{{"command", "audit"}, {"passed", all_passed}, {"reports", reports}}).dump(2)
      << "\n";
  return all_passed ? kPassed : kViolation;
}

TSchedule t_schedule(const Json& cfg) {
  const auto ts = numbers_or(cfg, "t", {0.5});
  if (ts.empty()) throw ConfigError("t schedule is empty");
  if (ts.size() == 1) return ts.front();
  return ts;
}

std::vector<LipschitzMap> map_sequence(const Context& ctx, const char* key) {
  if (ctx.cfg.contains(key) && ctx.cfg.at(key).is_array()) {
    std::vector<LipschitzMap> seq;
    for (const auto& m : ctx.cfg.at(key)) seq.push_back(io::map_from_json(ctx.space, m));
    if (seq.empty()) throw ConfigError(std::string(key) + " sequence is empty");
    return seq;
  }
  return {ctx.map(key)};
}

Json record_json(const SpaceModel& space, const BoundCheckRecord& r) {
  Json inputs = Json::array();
  for (const auto& p : r.inputs) inputs.push_back(io::point_to_json(space, p));
  return Json{{"label", r.label},
              {"n", r.n},
              {"lhs", r.lhs},
              {"rhs", std::isfinite(r.rhs) ? Json(r.rhs) : Json(io::format_double(r.rhs))},
              {"residual",
               std::isfinite(r.residual) ? Json(r.residual) : Json(io::format_double(r.residual))},
              {"vacuous", r.vacuous},
              {"rho", r.chain},
              {"inputs", inputs}};
}

int cmd_iterate(const Context& ctx, std::ostream& out) {
  ScheduleConfig sc;
  sc.t_schedule = t_schedule(ctx.cfg);
  sc.S_seq = map_sequence(ctx, "S");
  sc.T_seq = map_sequence(ctx, "T");
  sc.n_steps = count_or(ctx.cfg, "steps", 100);
  sc.stop_tol = number_or(ctx.cfg, "stop_tol", 1e-12);
  Rng rng0 = substream(ctx.seed, 0);
  Rng rng1 = substream(ctx.seed, 1);
  sc.x0 = ctx.point_or("x0", sample_point(ctx.space, rng0));
  sc.x1 = ctx.point_or("x1", sample_point(ctx.space, rng1));
  const double conv_tol = number_or(ctx.cfg, "converged_tol", 1e-9);
  const bool product_requested = ctx.cfg.contains("m");

  IterationTrace trace;
  try {
    trace = run_scheme(ctx.space, sc);
  } catch (const GeometryError& e) {
    // Validation failures are configuration errors; a blow-up mid-run is not.
    if (std::string(e.what()).rfind("non-finite", 0) == 0) {
      out << ctx.stamp(Json{{"command", "iterate"}, {"error", e.what()}}).dump(2) << "\n";
      return kViolation;
    }
    throw;
  }
  trace.tol = ctx.tol;

  double final_step = 0.0;
  for (const auto& s : trace.steps)
    if (s.step_dist) final_step = *s.step_dist;

  Json audits = Json::object();
  Json minima = Json::object();
  bool failed = false;
  auto insufficient = [](const char* check) {
    return Json{{"check", check}, {"status", "insufficient trace"}, {"passed", true}};
  };
  try {
    const auto r = audit_step_bound(trace);
    audits["step_bound"] = io::report_to_json(ctx.space, r);
    minima["step_bound"] = audits["step_bound"]["worst_residual"];
    failed = failed || r.status == AuditStatus::violated;
  } catch (const InsufficientTrace&) {
    audits["step_bound"] = insufficient("step_bound");
  }
  {
    const auto r = audit_monotone(trace);
    audits["monotone"] = io::report_to_json(ctx.space, r);
    minima["monotone"] = audits["monotone"]["worst_residual"];
    failed = failed || r.status == AuditStatus::violated;
  }
  {
    const std::size_t n = count_or(ctx.cfg, "n", 1);
    const std::size_t m = count_or(ctx.cfg, "m", 2);
    try {
      const auto rec = audit_product_bound(trace, n, m);
      const bool ok = rec.holds(ctx.tol);
      Json j = record_json(ctx.space, rec);
      j["passed"] = ok;
      j["counted"] = product_requested;
      audits["product_bound"] = j;
      minima["product_bound"] = j["residual"];
      failed = failed || (product_requested && !ok);
    } catch (const InsufficientTrace&) {
      audits["product_bound"] = insufficient("product_bound");
    }
  }

  Json summary{{"command", "iterate"},
               {"space", ctx.space.name()},
               {"converged", final_step <= conv_tol},
               {"stopped_early", trace.stopped_early},
               {"steps", trace.size() - 2},
               {"points", trace.size()},
               {"final_step_dist", final_step},
               {"final_point", io::point_to_json(ctx.space, trace.steps.back().x)},
               {"min_residuals", minima},
               {"audits", audits}};
  summary = ctx.stamp(std::move(summary));
  ctx.write("trace.csv", io::trace_csv(ctx.space, trace));
  ctx.write("summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return failed ? kViolation : kPassed;
}

int cmd_fixedpoint(const Context& ctx, std::ostream& out) {
  QtConfig qc;
  qc.S = ctx.map("S");
  qc.T = ctx.map("T");
  const auto required = strings_or(ctx.cfg, "strict", {});
  for (const auto& name : required) {
    if (name != "S" && name != "T") throw ConfigError("--strict takes S and/or T");
    const LipschitzMap& m = name == "S" ? qc.S : qc.T;
    if (!(m.declared_k() < 1.0))
      throw ConfigError(name + " is required to be a strict contraction but has K = " +
                        io::format_double(m.declared_k()));
  }
  if (!(qc.S.declared_k() < 1.0) && !(qc.T.declared_k() < 1.0))
    throw ConfigError("fixedpoint needs at least one strictly contractive map");
  const auto ts = numbers_or(ctx.cfg, "t", {0.0, 0.5, 1.0});
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("blend weights must lie in [0, 1]");
  const Point base = io::point_from_json(ctx.space, base_point_json(ctx.space));
  const Point p0 = ctx.point_or("p0", base);
  const Point x0 = ctx.point_or("x0", base);
  const double solve_tol = number_or(ctx.cfg, "solve_tol", 1e-13);
  const std::size_t max_iter = count_or(ctx.cfg, "max_iter", 100000);

  const ZtResult zr = compute_zt(ctx.space, qc, p0, x0, solve_tol, max_iter);
  const Point& ps = zr.s_fixed.point;
  const Point& ys = zr.t_fixed.point;
  const double span = distance(ctx.space, ps, ys);
  bool ok = zr.converged() && zr.endpoint_zero <= ctx.tol && zr.endpoint_one <= ctx.tol;

  Json results = Json::array();
  for (double t : ts) {
    const Point z = combine(ctx.space, ps, ys, t);
    const double to_y = distance(ctx.space, z, ys);
    const double to_p = distance(ctx.space, z, ps);
    const double blend_residual = std::max(std::abs(to_y - t * span), std::abs(to_p - (1.0 - t) * span));
    ok = ok && blend_residual <= ctx.tol;
    results.push_back(Json{{"t", t},
                           {"z", io::point_to_json(ctx.space, z)},
                           {"d_z_ystar", to_y},
                           {"d_z_pstar", to_p},
                           {"blend_residual", blend_residual}});
  }
  auto fp_json = [&](const FixedPointResult& f) {
    return Json{{"point", io::point_to_json(ctx.space, f.point)},
                {"iterations", f.iterations},
                {"final_step", f.final_step},
                {"converged", f.converged}};
  };
  Json doc = ctx.stamp(Json{{"command", "fixedpoint"},
                            {"space", ctx.space.name()},
                            {"p_star", fp_json(zr.s_fixed)},
                            {"y_star", fp_json(zr.t_fixed)},
                            {"endpoint_zero", zr.endpoint_zero},
                            {"endpoint_one", zr.endpoint_one},
                            {"passed", ok},
                            {"results", results}});
  if (!zr.converged()) doc["diagnostics"] = "fixed-point iteration did not reach solve_tol";
  ctx.write("fixedpoint.json", doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return ok ? kPassed : kViolation;
}

int cmd_bounds(const Context& ctx, std::ostream& out) {
  const auto checks = strings_or(ctx.cfg, "check", {"two_map"});
  if (checks.size() != 1) throw ConfigError("bounds takes exactly one --check");
  const std::string check = checks.front();
  if (check != "two_map" && check != "iterated" && check != "decay" && check != "slices")
    throw ConfigError("unknown bound check '" + check + "' (two_map, iterated, decay, slices)");
  const std::size_t tuples = count_or(ctx.cfg, "tuples", 1000);
  if (tuples == 0) throw ConfigError("--tuples must be >= 1");
  const auto ts = numbers_or(ctx.cfg, "t", {0.5});
  if (ts.empty()) throw ConfigError("t list is empty");
  QtConfig qc;
  qc.S = ctx.map("S");
  qc.T = ctx.map("T");
  for (double t : ts) {
    qc.t = t;
    qc.validate(ctx.space);
  }
  const std::size_t n = count_or(ctx.cfg, "n", check == "decay" ? 50 : 3);
  const std::size_t m = count_or(ctx.cfg, "m", 2);
  if (n == 0) throw ConfigError("--n must be >= 1");

  std::vector<BoundCheckRecord> records;
  std::ostringstream decay_csv;
  decay_csv << "tuple,t,regime,final_distance,tail_limsup,log_slope,status\n";
  std::size_t violations = 0;
  std::size_t inconclusive = 0;
  double worst = std::numeric_limits<double>::infinity();
  double max_final = 0.0;

  for (std::size_t i = 0; i < tuples; ++i) {
    Rng rng = substream(ctx.seed, i);
    const Point p = sample_point(ctx.space, rng);
    const Point q = sample_point(ctx.space, rng);
    const Point x = sample_point(ctx.space, rng);
    const Point y = sample_point(ctx.space, rng);
    for (double t : ts) {
      qc.t = t;
      if (check == "decay") {
        const DecayReport rep = check_decay(ctx.space, qc, p, q, x, y, n, ctx.tol);
        decay_csv << i << ',' << io::format_double(t) << ',' << to_string(rep.regime) << ','
                  << io::format_double(rep.final_distance) << ','
                  << io::format_double(rep.tail_limsup) << ',' << io::format_double(rep.log_slope)
                  << ',' << to_string(rep.status) << '\n';
        violations += rep.status == AuditStatus::violated;
        inconclusive += rep.status == AuditStatus::inconclusive;
        max_final = std::max(max_final, rep.final_distance);
        continue;
      }
      std::vector<BoundCheckRecord> batch;
      if (check == "two_map") batch.push_back(check_two_map_bound(ctx.space, qc, p, q, x, y));
      if (check == "iterated") batch.push_back(check_iterated_bound(ctx.space, qc, p, q, x, y, n));
      if (check == "slices") batch = check_slice_bounds(ctx.space, qc, p, q, x, y, n, m);
      for (auto& r : batch) {
        worst = std::min(worst, r.residual);
        violations += !r.holds(ctx.tol);
        records.push_back(std::move(r));
      }
    }
  }

  Json summary{{"command", "bounds"},
               {"check", check},
               {"space", ctx.space.name()},
               {"tuples", tuples},
               {"violations", violations},
               {"passed", violations == 0}};
  if (check == "decay") {
    summary["max_final_distance"] = max_final;
    summary["inconclusive"] = inconclusive;
    ctx.write("bounds.csv", decay_csv.str());
  } else {
    summary["records"] = records.size();
    summary["worst_residual"] = worst;
    ctx.write("bounds.csv", io::records_csv(ctx.space, records));
  }
  summary = ctx.stamp(std::move(summary));
  ctx.write("summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return violations == 0 ? kPassed : kViolation;
}

Json intervals_json(const std::vector<Interval>& ivs) {
  Json out = Json::array();
  for (const auto& iv : ivs)
    out.push_back(Json{{"lo", iv.lo}, {"hi", iv.hi}, {"lo_open", iv.lo_open}, {"hi_open", iv.hi_open}});
  return out;
}

int cmd_suggest(const Context& ctx, std::ostream& out) {
  for (const char* key : {"ks", "kt", "theta"})
    if (!ctx.cfg.contains(key)) throw ConfigError(std::string("suggest needs --") + key);
  const double ks = number_or(ctx.cfg, "ks", 0.0);
  const double kt = number_or(ctx.cfg, "kt", 0.0);
  const double theta = number_or(ctx.cfg, "theta", 0.0);
  if (!(ks >= 0.0 && kt >= 0.0 && theta >= 0.0))
    throw ConfigError("ks, kt and theta must be >= 0");
  const BlendSuggestion s = suggest_blend(ks, kt, theta);
  Json doc = ctx.stamp(Json{{"command", "suggest"},
                            {"ks", ks},
                            {"kt", kt},
                            {"theta", theta},
                            {"non_strict", intervals_json(s.non_strict)},
                            {"strict", intervals_json(s.strict)}});
  ctx.write("suggest.json", doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return kPassed;
}

int dispatch(const std::string& command, const CLI::App& sub, const Flags& f, std::ostream& out) {
  Json cfg = f.config.empty() ? Json::object() : load_config(f.config);
  overlay(sub, cfg, "--space", "space", f.space);
  overlay(sub, cfg, "--check", "check", f.checks);
  overlay(sub, cfg, "--p", "p", f.p);
  overlay(sub, cfg, "--samples", "samples", f.samples);
  overlay(sub, cfg, "--tuples", "tuples", f.tuples);
  overlay(sub, cfg, "--seed", "seed", f.seed);
  overlay(sub, cfg, "--tol", "tol", f.tol);
  overlay(sub, cfg, "--out", "out", f.out);
  overlay(sub, cfg, "--ks", "ks", f.ks);
  overlay(sub, cfg, "--kt", "kt", f.kt);
  overlay(sub, cfg, "--t", "t", f.t);
  overlay(sub, cfg, "--steps", "steps", f.steps);
  overlay(sub, cfg, "--epsilon", "epsilon", f.epsilon);
  overlay(sub, cfg, "--radius", "radius", f.radius);
  overlay(sub, cfg, "--n", "n", f.n);
  overlay(sub, cfg, "--m", "m", f.m);
  overlay(sub, cfg, "--theta", "theta", f.theta);
  overlay(sub, cfg, "--strict", "strict", f.strict);
  // A constant given on the command line replaces a map from the file.
  if (sub.count("--ks") > 0) cfg.erase("S");
  if (sub.count("--kt") > 0) cfg.erase("T");
  if (!cfg.contains("seed")) cfg["seed"] = env_seed();
  const Json& seed = cfg.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    throw ConfigError("seed must be a nonnegative integer");
  cfg["command"] = command;

  const std::string space_desc = cfg.contains("space") ? cfg.at("space").get<std::string>()
                                                       : std::string("euclidean:2");
  cfg["space"] = space_desc;
  SpaceModel space = io::parse_space(space_desc);
  if (command != "suggest") {
    for (const auto& [key, map_key] : {std::pair{"ks", "S"}, std::pair{"kt", "T"}})
      if (cfg.contains(key) && !cfg.contains(map_key))
        cfg[map_key] = constant_map_json(space, number_or(cfg, key, 1.0));
  }

  std::optional<fs::path> out_dir;
  if (cfg.contains("out")) {
    out_dir = fs::path(cfg.at("out").get<std::string>());
    std::error_code ec;
    fs::create_directories(*out_dir, ec);
    if (ec || !fs::is_directory(*out_dir))
      throw ConfigError("output directory '" + out_dir->string() + "' is not writable");
  }
  // The digest covers what determines the results, not where they go.
  Json hashed = cfg;
  hashed.erase("out");
  Context ctx{cfg,
              space,
              cfg.at("seed").get<std::uint64_t>(),
              io::config_digest(hashed),
              out_dir,
              number_or(cfg, "tol", default_tolerance(space))};
  if (!(ctx.tol >= 0.0)) throw ConfigError("--tol must be >= 0");

  if (command == "audit") return cmd_audit(ctx, out);
  if (command == "iterate") return cmd_iterate(ctx, out);
  if (command == "fixedpoint") return cmd_fixedpoint(ctx, out);
  if (command == "bounds") return cmd_bounds(ctx, out);
  return cmd_suggest(ctx, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cat0lab: geodesic metric-space laboratory"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"audit", "run sampled convexity and curvature audits"},
      {"iterate", "run the two-map iterative scheme with certificates"},
      {"fixedpoint", "compute p*, y* and the blended points z_t"},
      {"bounds", "check the two-map, iterated, decay and slice bounds on random tuples"},
      {"suggest", "blend weights keeping rho <= 1"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_options(*sub, flags);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return dispatch(commands[i].first, *subs[i], flags, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const InsufficientTrace& e) {
    err << "error: " << e.what() << "\n";
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const Json::exception& e) {
    err << "error: malformed configuration: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kConfigError;
}

}  // namespace cat0lab::cli
