#include "cat0lab/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "cat0lab/geodesic.hpp"
#include "cat0lab/sampling.hpp"

namespace cat0lab {
namespace {

constexpr double kAdmissibleSlack = 1e-9;
constexpr int kRefineSteps = 100;

std::size_t arity(Check check) {
  switch (check) {
    case Check::p_convexity:
      return 3;
    case Check::midpoint_pair:
    case Check::busemann:
    case Check::busemann_min:
      return 4;
    case Check::convex_structure:
    case Check::cat0:
      return 3;
  }
  return 3;
}

bool samples_t(Check check) { return check == Check::convex_structure || check == Check::cat0; }

AuditSample draw(const SpaceModel& space, std::size_t points, bool with_t, Rng& rng) {
  AuditSample s;
  s.points.reserve(points);
  for (std::size_t k = 0; k < points; ++k) s.points.push_back(sample_point(space, rng));
  if (with_t) s.t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return s;
}

ViolationReport new_report(Check check, const SpaceModel& space, const AuditSpec& spec) {
  spec.validate();
  ViolationReport r;
  r.check = to_string(check);
  r.space = space.name();
  r.p = spec.p.to_string();
  r.tol = spec.tol;
  return r;
}

ViolationReport run_check(Check check, const SpaceModel& space, const AuditSpec& spec) {
  ViolationReport report = new_report(check, space, spec);
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    Rng rng = substream(spec.seed, i);
    const AuditSample s = draw(space, arity(check), samples_t(check), rng);
    report.observe(evaluate_residual(check, space, spec.p, s), s);
  }
  report.finish();
  return report;
}

// 0 when m is an exact midpoint of x and y, negative otherwise.
double midpoint_residual(const SpaceModel& space, const Point& x, const Point& y, const Point& m) {
  const double half = 0.5 * distance(space, x, y);
  return -(std::abs(distance(space, x, m) - half) + std::abs(distance(space, y, m) - half));
}

bool admissible(double dxz, double dyz, double dxy, const ModulusProbe& probe) {
  return std::max(dxz, dyz) <= probe.r * (1.0 + kAdmissibleSlack) &&
         dxy >= probe.r * probe.epsilon * (1.0 - kAdmissibleSlack);
}

// d(z, m(x,y)) / r for an admissible triple, or -1.
double uc_ratio(const SpaceModel& space, const ModulusProbe& probe, const Point& x, const Point& y,
                const Point& z) {
  if (!admissible(distance(space, x, z), distance(space, y, z), distance(space, x, y), probe))
    return -1.0;
  return distance(space, z, midpoint(space, x, y)) / probe.r;
}

AuditSample draw_uc_triple(const SpaceModel& space, const ModulusProbe& probe, Rng& rng) {
  const Point z = sample_point(space, rng);
  Point x = sample_near(space, z, probe.r, rng);
  Point y = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.25
                ? antipode(space, z, x, rng)
                : sample_near(space, z, probe.r, rng);
  return AuditSample{{std::move(x), std::move(y), z}, 0.0};
}

}  // namespace

std::string to_string(Check check) {
  switch (check) {
    case Check::p_convexity:
      return "p_convexity";
    case Check::midpoint_pair:
      return "midpoint_pair";
    case Check::busemann:
      return "busemann";
    case Check::busemann_min:
      return "busemann_min";
    case Check::convex_structure:
      return "convex_structure";
    case Check::cat0:
      return "cat0";
  }
  return "unknown";
}

std::string to_string(Implication kind) {
  switch (kind) {
    case Implication::midpoint_implies_1convex:
      return "midpoint_implies_1convex";
    case Implication::busemann_midpoint_implies_pconvex:
      return "busemann_midpoint_implies_pconvex";
    case Implication::uc_implies_uc_p:
      return "uc_implies_uc_p";
  }
  return "unknown";
}

double evaluate_residual(Check check, const SpaceModel& space, ConvexityOrder p,
                         const AuditSample& s) {
  if (s.points.size() < arity(check)) throw GeometryError("sample has too few points");
  const auto& pts = s.points;
  auto d = [&](const Point& a, const Point& b) { return distance(space, a, b); };
  switch (check) {
    case Check::p_convexity: {
      const auto& [x, y, z] = std::tie(pts[0], pts[1], pts[2]);
      return power_mean2(d(x, z), d(y, z), p) - d(midpoint(space, x, y), z);
    }
    case Check::midpoint_pair: {
      const auto& [x, y, z, w] = std::tie(pts[0], pts[1], pts[2], pts[3]);
      const double q = p.value();
      const double mean = 0.25 * (std::pow(d(x, z), q) + std::pow(d(x, w), q) +
                                  std::pow(d(y, z), q) + std::pow(d(y, w), q));
      return std::pow(mean, 1.0 / q) - d(midpoint(space, x, y), midpoint(space, z, w));
    }
    case Check::busemann:
    case Check::busemann_min: {
      const auto& [x, y, z, w] = std::tie(pts[0], pts[1], pts[2], pts[3]);
      double rhs = power_mean2(d(x, z), d(y, w), p);
      if (check == Check::busemann_min) rhs = std::min(rhs, power_mean2(d(x, w), d(y, z), p));
      return rhs - d(midpoint(space, x, y), midpoint(space, z, w));
    }
    case Check::convex_structure: {
      const auto& [x, y, z] = std::tie(pts[0], pts[1], pts[2]);
      return s.t * d(z, x) + (1.0 - s.t) * d(z, y) - d(z, combine(space, x, y, s.t));
    }
    case Check::cat0: {
      const auto& [x, y, z] = std::tie(pts[0], pts[1], pts[2]);
      const double t = s.t;
      const double dzx = d(z, x), dzy = d(z, y), dxy = d(x, y);
      // (1-t)x (+) t y is combine(x, y, 1-t).
      const double lhs = d(combine(space, x, y, 1.0 - t), z);
      return (1.0 - t) * dzx * dzx + t * dzy * dzy - t * (1.0 - t) * dxy * dxy - lhs * lhs;
    }
  }
  return 0.0;
}

ViolationReport check_p_convexity(const SpaceModel& space, const AuditSpec& spec) {
  ViolationReport report = new_report(Check::p_convexity, space, spec);
  const bool finite = !spec.p.is_infinite();
  const double half_root = finite ? std::pow(0.5, 1.0 / spec.p.value()) : 1.0;
  double link1 = std::numeric_limits<double>::infinity();
  double link2 = link1, outer = link1, strict_min = link1;
  std::size_t strict_failures = 0, strict_eligible = 0;

  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    Rng rng = substream(spec.seed, i);
    const AuditSample s = draw(space, 3, false, rng);
    const auto& [x, y, z] = std::tie(s.points[0], s.points[1], s.points[2]);
    const double residual = evaluate_residual(Check::p_convexity, space, spec.p, s);
    report.observe(residual, s);

    const double a = distance(space, x, z);
    const double b = distance(space, y, z);
    const double dm = distance(space, midpoint(space, x, y), z);
    if (finite) {
      link1 = std::min(link1, half_root * (a + b) - dm);
      link2 = std::min(link2, 0.5 * (a + b) - half_root * (a + b));
      outer = std::min(outer, 0.5 * (a + b) - dm);
    }
    if (spec.strict) {
      const double dxy = distance(space, x, y);
      // Margins of tol keep rounding-level ties (x on the geodesic from z to y)
      // out of the strict set.
      const bool eligible = (finite && spec.p.value() == 1.0) ? dxy > std::abs(a - b) + spec.tol
                                                              : dxy > spec.tol;
      if (eligible) {
        ++strict_eligible;
        strict_min = std::min(strict_min, residual);
        if (!(residual > 0.0)) ++strict_failures;
      }
    }
  }
  if (finite) {
    report.details["relaxed_first_link"] = link1;
    report.details["relaxed_constant_link"] = link2;
    report.details["relaxed_outer"] = outer;
  }
  report.finish();
  if (spec.strict) {
    report.details["strict_eligible"] = static_cast<double>(strict_eligible);
    report.details["strict_failures"] = static_cast<double>(strict_failures);
    if (strict_eligible > 0) report.details["strict_min_residual"] = strict_min;
    if (strict_failures > 0) {
      report.status = AuditStatus::violated;
      report.note = "inequality not strict on " + std::to_string(strict_failures) + " samples";
    }
  }
  return report;
}

ViolationReport check_midpoint_pair_bound(const SpaceModel& space, const AuditSpec& spec) {
  if (spec.p.is_infinite()) throw GeometryError("midpoint pair bound is stated for finite p only");
  return run_check(Check::midpoint_pair, space, spec);
}

ViolationReport check_busemann(const SpaceModel& space, const AuditSpec& spec, bool use_min) {
  return run_check(use_min ? Check::busemann_min : Check::busemann, space, spec);
}

ViolationReport check_convex_structure(const SpaceModel& space, const AuditSpec& spec) {
  return run_check(Check::convex_structure, space, spec);
}

ViolationReport check_cat0(const SpaceModel& space, const AuditSpec& spec) {
  return run_check(Check::cat0, space, spec);
}

ModulusEstimate estimate_uc_modulus(const SpaceModel& space, ModulusProbe probe,
                                    ConvexityOrder p, const AuditSpec& spec) {
  spec.validate();
  if (!(probe.epsilon > 0.0 && probe.epsilon <= 2.0))
    throw GeometryError("modulus probe epsilon must lie in (0, 2]");
  if (!(probe.r > 0.0)) throw GeometryError("modulus probe radius must be > 0");

  ModulusEstimate est;
  double best = -1.0;
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    Rng rng = substream(spec.seed, i);
    AuditSample s = draw_uc_triple(space, probe, rng);
    const double ratio = uc_ratio(space, probe, s.points[0], s.points[1], s.points[2]);
    if (ratio < 0.0) continue;
    ++est.admissible;
    if (ratio > best) {
      best = ratio;
      est.witness = std::move(s);
    }
  }
  est.probe = probe;
  if (est.admissible == 0) {
    est.status = AuditStatus::inconclusive;
    return est;
  }

  // Coordinate hill-climb: take the best admissible single-point move, halve
  // the step when nothing improves.
  double step = 0.1 * probe.r;
  for (int it = 0; it < kRefineSteps; ++it) {
    AuditSample candidate;
    double candidate_ratio = best;
    for (std::size_t k = 0; k < 3; ++k) {
      for (auto& moved : local_moves(space, est.witness.points[k], step)) {
        AuditSample trial = est.witness;
        trial.points[k] = std::move(moved);
        const double ratio = uc_ratio(space, probe, trial.points[0], trial.points[1], trial.points[2]);
        if (ratio > candidate_ratio) {
          candidate_ratio = ratio;
          candidate = std::move(trial);
        }
      }
    }
    if (candidate.points.empty()) {
      step *= 0.5;
    } else {
      best = candidate_ratio;
      est.witness = std::move(candidate);
    }
  }

  est.sup_ratio = best;
  est.probe.estimated_delta = std::clamp(1.0 - best, 0.0, 1.0);
  const double ratio_p = p.is_infinite() ? (best >= 1.0 ? 1.0 : 0.0) : std::pow(best, p.value());
  est.delta_p = std::clamp(1.0 - ratio_p, 0.0, 1.0);
  est.status = AuditStatus::passed;
  return est;
}

ViolationReport check_implication(const SpaceModel& space, Implication kind, const AuditSpec& spec,
                                  ModulusProbe probe) {
  spec.validate();
  ViolationReport report;
  report.check = "implication:" + to_string(kind);
  report.space = space.name();
  report.p = kind == Implication::midpoint_implies_1convex ? "1" : spec.p.to_string();
  report.tol = spec.tol;

  std::size_t held = 0, counterexamples = 0;
  auto fold = [&](bool hypothesis, double conclusion, const AuditSample& s) {
    if (!hypothesis) return;
    ++held;
    report.observe(conclusion, s);
    if (conclusion < -spec.tol) ++counterexamples;
  };

  switch (kind) {
    case Implication::midpoint_implies_1convex: {
      for (std::size_t i = 0; i < spec.sample_count; ++i) {
        Rng rng = substream(spec.seed, i);
        const AuditSample s = draw(space, 3, false, rng);
        const Point m = midpoint(space, s.points[0], s.points[1]);
        const bool h = midpoint_residual(space, s.points[0], s.points[1], m) >= -spec.tol;
        fold(h, evaluate_residual(Check::p_convexity, space, ConvexityOrder(1.0), s), s);
      }
      break;
    }
    case Implication::busemann_midpoint_implies_pconvex: {
      for (std::size_t i = 0; i < spec.sample_count; ++i) {
        Rng rng = substream(spec.seed, i);
        const AuditSample quad = draw(space, 4, false, rng);
        const auto& [x, y, z, w] = std::tie(quad.points[0], quad.points[1], quad.points[2], quad.points[3]);
        // p-convexity is the Busemann condition with the second segment
        // collapsed to z, so the hypothesis is evaluated on both (x,y,z,w)
        // and (x,y,z,z).
        const AuditSample collapsed{{x, y, z, z}, 0.0};
        const bool h = midpoint_residual(space, x, y, midpoint(space, x, y)) >= -spec.tol &&
                       evaluate_residual(Check::busemann, space, spec.p, quad) >= -spec.tol &&
                       evaluate_residual(Check::busemann, space, spec.p, collapsed) >= -spec.tol;
        const AuditSample triple{{x, y, z}, 0.0};
        fold(h, evaluate_residual(Check::p_convexity, space, spec.p, triple), triple);
      }
      break;
    }
    case Implication::uc_implies_uc_p: {
      const ModulusEstimate est = estimate_uc_modulus(space, probe, ConvexityOrder(1.0), spec);
      if (est.status == AuditStatus::inconclusive) {
        report.status = AuditStatus::inconclusive;
        report.note = "no admissible triple for the modulus probe";
        return report;
      }
      const double delta = est.probe.estimated_delta;
      const double q = spec.p.is_infinite() ? 1.0 : spec.p.value();
      // Uniform convexity with delta gives uniform p-convexity with
      // delta_p = 1 - (1 - delta)^p.
      const double delta_p = 1.0 - std::pow(1.0 - delta, q);
      report.details["delta"] = delta;
      report.details["delta_p"] = delta_p;
      const bool delta_p_valid = delta_p > 0.0 && delta_p <= 1.0;
      for (std::size_t i = 0; i < spec.sample_count; ++i) {
        Rng rng = substream(spec.seed, i);
        const AuditSample s = draw_uc_triple(space, probe, rng);
        const double ratio = uc_ratio(space, probe, s.points[0], s.points[1], s.points[2]);
        if (ratio < 0.0) continue;
        const bool h = ratio <= 1.0 - delta + spec.tol;
        const double bound = delta_p_valid ? std::pow(1.0 - delta_p, 1.0 / q) : -1.0;
        fold(h, probe.r * (bound - ratio), s);
      }
      break;
    }
  }

  report.details["hypothesis_held"] = static_cast<double>(held);
  report.details["counterexamples"] = static_cast<double>(counterexamples);
  if (held == 0) {
    report.status = AuditStatus::passed;
    report.note = "vacuous: hypothesis never held";
    return report;
  }
  report.finish();
  return report;
}

bool is_eps_separated(const SpaceModel& space, std::span<const Point> points, double epsilon) {
  if (!(epsilon > 0.0)) throw GeometryError("epsilon must be > 0");
  if (points.empty()) throw GeometryError("point family must be nonempty");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (distance(space, points[i], points[j]) < epsilon) return false;
  return true;
}

}  // namespace cat0lab
