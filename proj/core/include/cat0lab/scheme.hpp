#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cat0lab/mappings.hpp"
#include "cat0lab/qt_dynamics.hpp"
#include "cat0lab/report.hpp"

namespace cat0lab {

/// Raised by the trace audits when the trace has too few points.
class InsufficientTrace : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Blend weights t_n: a constant, an explicit list (the last entry is held
/// beyond the end), or a rule n -> t_n.
using TSchedule = std::variant<double, std::vector<double>, std::function<double(std::size_t)>>;

struct ScheduleConfig {
  TSchedule t_schedule = 0.5;
  /// One map means a constant sequence; longer lists hold the last entry.
  std::vector<LipschitzMap> S_seq{LipschitzMap::identity()};
  std::vector<LipschitzMap> T_seq{LipschitzMap::identity()};
  std::size_t n_steps = 1;
  Point x0;
  Point x1;
  double stop_tol = 1e-12;

  double t_at(std::size_t n) const;
  const LipschitzMap& S_at(std::size_t n) const;
  const LipschitzMap& T_at(std::size_t n) const;

  /// Throws GeometryError on an empty map list, n_steps == 0, stop_tol <= 0,
  /// a listed t outside [0,1], or maps/points that do not fit `space`.
  void validate(const SpaceModel& space) const;
};

/// Quantities attached to the point x_n. Fields that need later points are
/// empty at the end of the trace.
struct StepRecord {
  std::size_t n = 0;
  double t = 0.0;
  double ks = 0.0;  // declared constant of S_n
  double kt = 0.0;  // declared constant of T_n
  Point x;
  std::optional<double> step_dist;  // D_n = d(x_n, x_{n+1})
  std::optional<double> theta;      // theta_n, from x_{n-1}, x_n, x_{n+1}; n >= 1
  std::optional<double> rho;        // rho_n = compute_rho(t_n, K_S_n, K_T_n, theta_n)
  /// rho_{n+1} max(D_{n+1}^2, D_n^2) - D_{n+2}^2
  std::optional<double> step_bound_residual;
  /// D_n - D_{n+2}
  std::optional<double> monotone_residual;
};

struct IterationTrace {
  std::string space;
  double tol = 1e-9;
  std::vector<StepRecord> steps;  // one per point x_0, x_1, ...
  /// Two consecutive steps at or below stop_tol ended the run.
  bool stopped_early = false;

  std::size_t size() const { return steps.size(); }
  const Point& point(std::size_t n) const { return steps.at(n).x; }
};

/// x_{n+2} = combine(S_n x_{n+1}, T_n x_n, t_n) for n = 0 .. n_steps - 1,
/// with all certificates filled in. Throws GeometryError when a distance is
/// not finite (the message names the step).
IterationTrace run_scheme(const SpaceModel& space, const ScheduleConfig& cfg);

/// theta_{n+1} from x_n, x_{n+1}, x_{n+2} and the maps S_n, T_n:
///   [d(S x2, T x0) + d(S x1, T x0) + d(T x1, S x1) + d(S x2, T x1)]
///     / max(d(x1, x2), d(x0, x1)).
/// Empty when the denominator is 0.
std::optional<double> compute_theta(const SpaceModel& space, const LipschitzMap& S,
                                    const LipschitzMap& T, const Point& x0, const Point& x1,
                                    const Point& x2);

/// t^2 K_S^2 + (1-t)^2 K_T^2 + t(1-t) min(K_S, K_T) theta.
double compute_rho(double t, double ks, double kt, double theta);

/// d^2(x_{n+2}, x_{n+3}) <= rho_{n+1} max(d^2(x_{n+1}, x_{n+2}), d^2(x_n, x_{n+1}))
/// for every n the trace covers. Steps with undefined rho pass vacuously.
/// Throws InsufficientTrace below four points.
ViolationReport audit_step_bound(const IterationTrace& trace);

/// lhs = d^2(x_{n+m}, x_{n+m+1}),
/// rhs = rho_n ... rho_{n+m-1} max(d^2(x_{n+1}, x_{n+2}), d^2(x_n, x_{n+1})).
/// Vacuous when a rho in range is undefined. Throws GeometryError for m < 2
/// and InsufficientTrace when the trace ends before x_{n+m+1}.
BoundCheckRecord audit_product_bound(const IterationTrace& trace, std::size_t n, std::size_t m);

/// d(x_{n+2}, x_{n+3}) <= d(x_n, x_{n+1}) from the first index k with
/// D_{k+1} <= D_k onwards; strict decrease is also required (where
/// D_n > tol) when every defined rho is < 1. Inconclusive when some rho
/// exceeds 1 or no anchor exists.
/// details: anchor, strict (0/1), strict_failures, max_rho.
ViolationReport audit_monotone(const IterationTrace& trace);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double t) const {
    return (lo_open ? t > lo : t >= lo) && (hi_open ? t < hi : t <= hi);
  }
};

struct BlendSuggestion {
  std::vector<Interval> non_strict;  // {t in [0,1] : rho(t) <= 1}
  std::vector<Interval> strict;      // {t in [0,1] : rho(t) < 1}
};

/// The sets of blend weights keeping rho(t; K_S, K_T, theta) at most 1 (and
/// below 1), from the roots of the quadratic in t. Usually one interval;
/// a concave rho can leave two.
BlendSuggestion suggest_blend(double ks, double kt, double theta);

}  // namespace cat0lab
