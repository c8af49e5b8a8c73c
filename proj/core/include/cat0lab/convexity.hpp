#pragma once

#include <span>

#include "cat0lab/report.hpp"
#include "cat0lab/space.hpp"

namespace cat0lab {

/// Sampled inequality checks. Every check draws its tuples from
/// `substream(spec.seed, i)`, evaluates `rhs - lhs` and reports the minimum.
enum class Check {
  p_convexity,       // d(m(x,y), z) <= M_p(d(x,z), d(y,z))
  midpoint_pair,     // d(m(x,y), m(z,w)) <= (1/4 sum of four d^p)^(1/p)
  busemann,          // d(m(x,y), m(z,w)) <= M_p(d(x,z), d(y,w))
  busemann_min,      // as above, minimum over both pairings
  convex_structure,  // d(z, W(x,y,t)) <= t d(z,x) + (1-t) d(z,y)
  cat0,              // the CAT(0) comparison inequality
};

std::string to_string(Check check);

/// Residual (rhs - lhs) of `check` on one tuple. Used by the audits and to
/// re-evaluate report witnesses.
double evaluate_residual(Check check, const SpaceModel& space, ConvexityOrder p,
                         const AuditSample& sample);

/// Strict mode additionally requires a positive residual whenever
/// d(x,y) > tol (p > 1), or whenever d(x,y) > |d(x,z) - d(y,z)| + tol (p = 1). The links of
/// the relaxed bound (1/2)^{1/p}(a+b) are reported in `details` as
/// relaxed_first_link, relaxed_constant_link and relaxed_outer; they do not
/// affect the verdict.
ViolationReport check_p_convexity(const SpaceModel& space, const AuditSpec& spec);

/// Rejects p = inf.
ViolationReport check_midpoint_pair_bound(const SpaceModel& space, const AuditSpec& spec);

ViolationReport check_busemann(const SpaceModel& space, const AuditSpec& spec, bool use_min);

ViolationReport check_convex_structure(const SpaceModel& space, const AuditSpec& spec);

/// residual = (1-t) d^2(z,x) + t d^2(z,y) - t(1-t) d^2(x,y) - d^2(combine(x,y,1-t), z)
ViolationReport check_cat0(const SpaceModel& space, const AuditSpec& spec);

struct ModulusProbe {
  double epsilon = 1.0;
  double r = 1.0;
  double estimated_delta = 0.0;
};

struct ModulusEstimate {
  ModulusProbe probe;
  /// 1 - sup_ratio^p, the modulus in the uniformly p-convex form.
  double delta_p = 0.0;
  double sup_ratio = 0.0;
  std::size_t admissible = 0;
  AuditStatus status = AuditStatus::inconclusive;
  AuditSample witness;  // (x, y, z) attaining sup_ratio
};

/// Estimates delta(eps) = 1 - sup d(z, m(x,y)) / r over triples with
/// max(d(x,z), d(y,z)) <= r and d(x,y) >= r eps (both with relative slack
/// 1e-9). Rejection sampling around random centres is followed by a
/// coordinate hill-climb of 100 steps from the best triple. Status is
/// inconclusive when no admissible triple was found.
ModulusEstimate estimate_uc_modulus(const SpaceModel& space, ModulusProbe probe,
                                    ConvexityOrder p, const AuditSpec& spec);

enum class Implication {
  midpoint_implies_1convex,
  busemann_midpoint_implies_pconvex,
  uc_implies_uc_p,
};

std::string to_string(Implication kind);

/// Evaluates hypothesis and conclusion on the same tuples and fails iff some
/// tuple satisfies the hypothesis but violates the conclusion. The report's
/// worst_residual is the minimum conclusion residual over hypothesis-holding
/// tuples; details carry `hypothesis_held` and `counterexamples`.
/// `probe` is only used by uc_implies_uc_p.
ViolationReport check_implication(const SpaceModel& space, Implication kind,
                                  const AuditSpec& spec, ModulusProbe probe = {});

/// Pairwise distances of distinct indices all >= epsilon.
bool is_eps_separated(const SpaceModel& space, std::span<const Point> points, double epsilon);

}  // namespace cat0lab
