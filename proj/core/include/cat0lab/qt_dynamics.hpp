#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cat0lab/mappings.hpp"
#include "cat0lab/report.hpp"

namespace cat0lab {

/// Blend operator Q_t(a, b) = t a (+) (1 - t) b together with the two maps
/// whose images it blends.
struct QtConfig {
  double t = 0.5;
  LipschitzMap S = LipschitzMap::identity();
  LipschitzMap T = LipschitzMap::identity();

  /// Throws GeometryError unless t is in [0,1] and both maps fit `space`.
  void validate(const SpaceModel& space) const;
};

struct BoundCheckRecord {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // rhs - lhs
  std::size_t n = 0;
  double t = 0.0;
  std::vector<Point> inputs;  // p, q, x, y
  /// Residuals of the intermediate links of the derivation, in order.
  std::vector<double> chain;
  /// Set when the bound is undefined and the record passes vacuously.
  bool vacuous = false;

  bool holds(double tol) const { return vacuous || residual >= -tol; }
};

/// combine(a, b, t). Callers pass S x and T y explicitly.
Point qt_apply(const SpaceModel& space, const QtConfig& cfg, const Point& a, const Point& b);

/// lhs = d^2(Q_t(Sp, Tx), Q_t(Sq, Ty))
/// rhs = (t^2 K_S^2 + (1-t)^2 K_T^2) max(d^2(p,q), d^2(x,y))
///       + t(1-t) (d(Sp,Ty) + d(Sq,Ty) + d(Tx,Sq) + d(Sp,Tx)) min(K_S d(p,q), K_T d(x,y))
/// `chain` holds the three link residuals: the CAT(0) inequality applied to
/// the outer blend, then to both inner terms, then the Lipschitz/triangle
/// estimate closing the chain.
BoundCheckRecord check_two_map_bound(const SpaceModel& space, const QtConfig& cfg, const Point& p,
                                     const Point& q, const Point& x, const Point& y);

/// The two-map bound with S -> S^n, T -> T^n and K -> K^n. n = 1 is
/// check_two_map_bound.
BoundCheckRecord check_iterated_bound(const SpaceModel& space, const QtConfig& cfg, const Point& p,
                                      const Point& q, const Point& x, const Point& y,
                                      std::size_t n);

enum class DecayRegime {
  strict,        // K_S, K_T < 1
  s_contracts,   // K_S < 1, K_T = 1 with a known fixed point of T
  t_contracts,   // K_T < 1, K_S = 1 with a known fixed point of S
  unsupported,
};

std::string to_string(DecayRegime regime);

struct DecayReport {
  DecayRegime regime = DecayRegime::unsupported;
  /// n = 1..n_max. Strict regime: lhs = d_n, rhs = sqrt of the iterated bound.
  /// Mixed regimes: lhs = d_n^2, rhs = min(t^2,(1-t)^2) max(d^2(x,y), d^2(p,q)).
  std::vector<BoundCheckRecord> records;
  double final_distance = 0.0;
  /// Mixed regimes: max of lhs - rhs over the last 10% of the records.
  double tail_limsup = 0.0;
  /// Strict regime: least-squares slope of log d_n against n (NaN if fewer
  /// than two positive terms).
  double log_slope = 0.0;
  AuditStatus status = AuditStatus::inconclusive;
  std::string note;
};

/// d_n = d(Q_t(S^n p, T^n x), Q_t(S^n q, T^n y)). Strict regime passes when
/// d_{n_max} <= tol; mixed regimes pass when the tail limsup is <= tol.
DecayReport check_decay(const SpaceModel& space, const QtConfig& cfg, const Point& p,
                        const Point& q, const Point& x, const Point& y, std::size_t n_max,
                        double tol);

/// The four slice inequalities with first powers on both sides:
///   d(Q_t(S^m p, T x),   Q_t(S^m p, T y))   <= (1-t) K_T   d(x,y)
///   d(Q_t(S^m p, T^n x), Q_t(S^m p, T^n y)) <= (1-t) K_T^n d(x,y)
///   d(Q_t(S p,   T^m x), Q_t(S q,   T^m x)) <= t K_S       d(p,q)
///   d(Q_t(S^n p, T^m x), Q_t(S^n q, T^m x)) <= t K_S^n     d(p,q)
std::vector<BoundCheckRecord> check_slice_bounds(const SpaceModel& space, const QtConfig& cfg,
                                                 const Point& p, const Point& q, const Point& x,
                                                 const Point& y, std::size_t n, std::size_t m);

struct ZtResult {
  FixedPointResult z;
  FixedPointResult s_fixed;  // p*
  FixedPointResult t_fixed;  // y*
  /// d(z_0, y*) and d(z_1, p*): the endpoint identities.
  double endpoint_zero = 0.0;
  double endpoint_one = 0.0;
  bool converged() const { return z.converged; }
};

/// p* = Sp*, y* = Ty* (Picard iteration for strict contractions, closed form
/// for nonexpansive maps with a known fixed point) and z_t = combine(p*, y*, t).
/// Throws GeometryError when a map is neither a strict contraction nor
/// nonexpansive with a known fixed point.
ZtResult compute_zt(const SpaceModel& space, const QtConfig& cfg, const Point& p0, const Point& x0,
                    double tol, std::size_t max_iter);

}  // namespace cat0lab
