#include "cat0lab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cat0lab/geodesic.hpp"

namespace cat0lab {
namespace {

const LipschitzMap& held(const std::vector<LipschitzMap>& seq, std::size_t n) {
  if (seq.empty()) throw GeometryError("map sequence is empty");
  return seq[std::min(n, seq.size() - 1)];
}

double checked_distance(const SpaceModel& space, const Point& a, const Point& b, std::size_t n) {
  const double v = distance(space, a, b);
  if (!std::isfinite(v)) throw GeometryError("non-finite distance at step " + std::to_string(n));
  return v;
}

// f(t) = rho(t) - 1 written as a t^2 + b t + c.
struct Quadratic {
  double a, b, c;
};

Quadratic rho_minus_one(double ks, double kt, double theta) {
  const double mix = std::min(ks, kt) * theta;
  return {ks * ks + kt * kt - mix, mix - 2.0 * kt * kt, kt * kt - 1.0};
}

std::vector<double> roots_in_unit(const Quadratic& q) {
  std::vector<double> out;
  const double scale = std::max({std::abs(q.a), std::abs(q.b), std::abs(q.c), 1.0});
  if (std::abs(q.a) <= 1e-15 * scale) {
    if (std::abs(q.b) > 1e-15 * scale) out.push_back(-q.c / q.b);
  } else {
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc >= 0.0) {
      // Cancellation-free pair of roots.
      const double s = std::sqrt(disc);
      const double k = -0.5 * (q.b + std::copysign(s, q.b));
      if (k != 0.0) {
        out.push_back(k / q.a);
        out.push_back(q.c / k);
      } else {
        out.push_back(0.0);
      }
    }
  }
  std::vector<double> kept;
  for (double r : out)
    if (r >= 0.0 && r <= 1.0) kept.push_back(r);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  return kept;
}

}  // namespace

double ScheduleConfig::t_at(std::size_t n) const {
  return std::visit(
      [n](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, double>) {
          return s;
        } else if constexpr (std::is_same_v<S, std::vector<double>>) {
          if (s.empty()) throw GeometryError("t schedule list is empty");
          return s[std::min(n, s.size() - 1)];
        } else {
          if (!s) throw GeometryError("t schedule rule is empty");
          return s(n);
        }
      },
      t_schedule);
}

const LipschitzMap& ScheduleConfig::S_at(std::size_t n) const { return held(S_seq, n); }
const LipschitzMap& ScheduleConfig::T_at(std::size_t n) const { return held(T_seq, n); }

void ScheduleConfig::validate(const SpaceModel& space) const {
  if (n_steps == 0) throw GeometryError("n_steps must be >= 1");
  if (!(stop_tol > 0.0)) throw GeometryError("stop_tol must be > 0");
  if (S_seq.empty() || T_seq.empty()) throw GeometryError("map sequences must be nonempty");
  auto check_t = [](double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw GeometryError("blend weight t_n must lie in [0, 1]");
  };
  if (const auto* c = std::get_if<double>(&t_schedule)) check_t(*c);
  if (const auto* l = std::get_if<std::vector<double>>(&t_schedule)) {
    if (l->empty()) throw GeometryError("t schedule list is empty");
    for (double t : *l) check_t(t);
  }
  if (const auto* f = std::get_if<std::function<double(std::size_t)>>(&t_schedule); f && !*f)
    throw GeometryError("t schedule rule is empty");
  for (const auto& m : S_seq) validate_map(space, m);
  for (const auto& m : T_seq) validate_map(space, m);
  space.require(x0);
  space.require(x1);
}

std::optional<double> compute_theta(const SpaceModel& space, const LipschitzMap& S,
                                    const LipschitzMap& T, const Point& x0, const Point& x1,
                                    const Point& x2) {
  const double denom = std::max(distance(space, x1, x2), distance(space, x0, x1));
  if (!(denom > 0.0)) return std::nullopt;
  const Point sx1 = apply(space, S, x1);
  const Point sx2 = apply(space, S, x2);
  const Point tx0 = apply(space, T, x0);
  const Point tx1 = apply(space, T, x1);
  const double num = distance(space, sx2, tx0) + distance(space, sx1, tx0) +
                     distance(space, tx1, sx1) + distance(space, sx2, tx1);
  return num / denom;
}

double compute_rho(double t, double ks, double kt, double theta) {
  const double s = 1.0 - t;
  return t * t * ks * ks + s * s * kt * kt + t * s * std::min(ks, kt) * theta;
}

IterationTrace run_scheme(const SpaceModel& space, const ScheduleConfig& cfg) {
  cfg.validate(space);
  IterationTrace trace;
  trace.space = space.name();
  trace.tol = default_tolerance(space);

  std::vector<Point> xs{space.canonical(cfg.x0), space.canonical(cfg.x1)};
  std::vector<double> dist{checked_distance(space, xs[0], xs[1], 0)};
  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    const double t = cfg.t_at(n);
    if (!(t >= 0.0 && t <= 1.0))
      throw GeometryError("t_" + std::to_string(n) + " lies outside [0, 1]");
    xs.push_back(combine(space, apply(space, cfg.S_at(n), xs[n + 1]),
                         apply(space, cfg.T_at(n), xs[n]), t));
    dist.push_back(checked_distance(space, xs[n + 1], xs[n + 2], n + 1));
    if (dist[n] <= cfg.stop_tol && dist[n + 1] <= cfg.stop_tol) {
      trace.stopped_early = n + 1 < cfg.n_steps;
      break;
    }
  }

  const std::size_t count = xs.size();
  trace.steps.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    StepRecord& r = trace.steps[n];
    r.n = n;
    r.t = cfg.t_at(n);
    r.ks = cfg.S_at(n).declared_k();
    r.kt = cfg.T_at(n).declared_k();
    r.x = xs[n];
    if (n < dist.size()) r.step_dist = dist[n];
    if (n >= 1 && n + 1 < count) {
      r.theta = compute_theta(space, cfg.S_at(n - 1), cfg.T_at(n - 1), xs[n - 1], xs[n], xs[n + 1]);
      if (r.theta) r.rho = compute_rho(r.t, r.ks, r.kt, *r.theta);
    }
  }
  for (std::size_t n = 0; n + 2 < dist.size(); ++n) {
    trace.steps[n].monotone_residual = dist[n] - dist[n + 2];
    if (const auto& rho = trace.steps[n + 1].rho) {
      const double window = std::max(dist[n + 1], dist[n]);
      trace.steps[n].step_bound_residual = *rho * window * window - dist[n + 2] * dist[n + 2];
    }
  }
  return trace;
}

ViolationReport audit_step_bound(const IterationTrace& trace) {
  if (trace.size() < 4) throw InsufficientTrace("step bound needs at least 4 points");
  ViolationReport report;
  report.check = "step_bound";
  report.space = trace.space;
  report.p = "2";
  report.tol = trace.tol;
  double vacuous = 0.0;
  for (std::size_t n = 0; n + 3 < trace.size(); ++n) {
    const auto& r = trace.steps[n].step_bound_residual;
    if (!r) {
      vacuous += 1.0;
      continue;
    }
    report.observe(*r, AuditSample{{trace.point(n), trace.point(n + 1), trace.point(n + 2),
                                    trace.point(n + 3)},
                                   trace.steps[n + 1].t});
  }
  report.details["vacuous"] = vacuous;
  report.finish();
  return report;
}

BoundCheckRecord audit_product_bound(const IterationTrace& trace, std::size_t n, std::size_t m) {
  if (m < 2) throw GeometryError("product bound needs m >= 2");
  if (trace.size() < n + m + 2)
    throw InsufficientTrace("product bound needs x_" + std::to_string(n + m + 1));
  auto d = [&](std::size_t i) { return *trace.steps[i].step_dist; };

  BoundCheckRecord rec;
  rec.label = "product_bound";
  rec.n = n;
  rec.t = trace.steps[n].t;
  rec.inputs = {trace.point(n), trace.point(n + m), trace.point(n + m + 1)};
  rec.lhs = d(n + m) * d(n + m);
  double prod = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& rho = trace.steps[n + i].rho;
    if (!rho) {
      rec.vacuous = true;
      rec.rhs = std::numeric_limits<double>::infinity();
      rec.residual = rec.rhs;
      return rec;
    }
    prod *= *rho;
    rec.chain.push_back(*rho);
  }
  const double window = std::max(d(n + 1), d(n));
  rec.rhs = prod * window * window;
  rec.residual = rec.rhs - rec.lhs;
  return rec;
}

ViolationReport audit_monotone(const IterationTrace& trace) {
  ViolationReport report;
  report.check = "monotone";
  report.space = trace.space;
  report.p = "1";
  report.tol = trace.tol;

  double max_rho = -std::numeric_limits<double>::infinity();
  bool any_rho = false;
  for (const auto& s : trace.steps)
    if (s.rho) {
      any_rho = true;
      max_rho = std::max(max_rho, *s.rho);
    }
  report.details["max_rho"] = any_rho ? max_rho : 0.0;
  if (any_rho && max_rho > 1.0) {
    report.status = AuditStatus::inconclusive;
    report.note = "hypothesis unmet: some rho_n exceeds 1";
    return report;
  }

  std::optional<std::size_t> anchor;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const auto& a = trace.steps[k].step_dist;
    const auto& b = trace.steps[k + 1].step_dist;
    if (a && b && *b <= *a) {
      anchor = k;
      break;
    }
  }
  if (!anchor) {
    report.status = AuditStatus::inconclusive;
    report.note = "hypothesis unmet: no index with d(x_{k+1}, x_{k+2}) <= d(x_k, x_{k+1})";
    return report;
  }

  const bool strict = any_rho && max_rho < 1.0;
  double strict_failures = 0.0;
  for (std::size_t n = *anchor; n < trace.size(); ++n) {
    const auto& r = trace.steps[n].monotone_residual;
    if (!r) continue;
    const AuditSample sample{{trace.point(n), trace.point(n + 1), trace.point(n + 2),
                              trace.point(n + 3)},
                             trace.steps[n].t};
    report.observe(*r, sample);
    if (strict && *trace.steps[n].step_dist > trace.tol && !(*r > 0.0)) strict_failures += 1.0;
  }
  report.details["anchor"] = static_cast<double>(*anchor);
  report.details["strict"] = strict ? 1.0 : 0.0;
  report.details["strict_failures"] = strict_failures;
  report.finish();
  if (strict_failures > 0.0) {
    report.status = AuditStatus::violated;
    report.note = "distances failed to decrease strictly although every rho_n < 1";
  }
  return report;
}

BlendSuggestion suggest_blend(double ks, double kt, double theta) {
  if (!(ks >= 0.0 && kt >= 0.0)) throw GeometryError("Lipschitz constants must be >= 0");
  if (!(theta >= 0.0)) throw GeometryError("theta bound must be >= 0");
  const Quadratic q = rho_minus_one(ks, kt, theta);
  auto f = [&](double t) { return compute_rho(t, ks, kt, theta) - 1.0; };

  std::vector<double> cuts{0.0};
  for (double r : roots_in_unit(q))
    if (r > 0.0 && r < 1.0) cuts.push_back(r);
  cuts.push_back(1.0);

  BlendSuggestion out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double mid = f(0.5 * (lo + hi));
    if (mid <= 0.0) {
      if (!out.non_strict.empty() && out.non_strict.back().hi == lo)
        out.non_strict.back().hi = hi;
      else
        out.non_strict.push_back({lo, hi, false, false});
    }
    // Interior cuts are roots, so rho = 1 there.
    if (mid < 0.0) out.strict.push_back({lo, hi, i > 0 || !(f(lo) < 0.0),
                                         i + 2 < cuts.size() || !(f(hi) < 0.0)});
  }
  // Isolated touching points (rho = 1 exactly, above 1 on both sides).
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double c = cuts[i];
    const bool interior = i > 0 && i + 1 < cuts.size();
    if (!interior && !(f(c) <= 0.0)) continue;
    const bool covered = std::any_of(out.non_strict.begin(), out.non_strict.end(),
                                     [c](const Interval& iv) { return iv.contains(c); });
    if (!covered) out.non_strict.push_back({c, c, false, false});
  }
  std::sort(out.non_strict.begin(), out.non_strict.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return out;
}

}  // namespace cat0lab
