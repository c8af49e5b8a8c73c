#include "cat0lab/qt_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cat0lab/geodesic.hpp"

namespace cat0lab {
namespace {

constexpr double kUnitTol = 1e-12;

double sq(double v) { return v * v; }

// Images of p, q under the S-side map and of x, y under the T-side map,
// with the Lipschitz constants that go with them.
struct Images {
  Point sp, sq, tx, ty;
  double ks, kt;
};

BoundCheckRecord two_map_record(const SpaceModel& space, double t, const Images& im,
                                const Point& p, const Point& q, const Point& x, const Point& y) {
  auto d = [&](const Point& a, const Point& b) { return distance(space, a, b); };
  const Point v = combine(space, im.sp, im.tx, t);
  const Point w = combine(space, im.sq, im.ty, t);
  const double u = t * (1.0 - t);

  const double lhs = sq(d(v, w));
  const double link1 = t * sq(d(im.sp, w)) + (1.0 - t) * sq(d(im.tx, w)) - u * sq(d(im.sp, im.tx));
  const double link2 = sq(t) * sq(d(im.sp, im.sq)) + sq(1.0 - t) * sq(d(im.tx, im.ty)) +
                       u * (sq(d(im.sp, im.ty)) + sq(d(im.tx, im.sq)) - sq(d(im.sq, im.ty)) -
                            sq(d(im.sp, im.tx)));
  const double dpq = d(p, q);
  const double dxy = d(x, y);
  const double cross = d(im.sp, im.ty) + d(im.sq, im.ty) + d(im.tx, im.sq) + d(im.sp, im.tx);
  const double rhs = (sq(t) * sq(im.ks) + sq(1.0 - t) * sq(im.kt)) * std::max(sq(dpq), sq(dxy)) +
                     u * cross * std::min(im.ks * dpq, im.kt * dxy);

  BoundCheckRecord r;
  r.label = "two_map";
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = rhs - lhs;
  r.n = 1;
  r.t = t;
  r.inputs = {p, q, x, y};
  r.chain = {link1 - lhs, link2 - link1, rhs - link2};
  return r;
}

BoundCheckRecord first_power_record(std::string label, double lhs, double rhs, std::size_t n,
                                    double t, std::vector<Point> inputs) {
  BoundCheckRecord r;
  r.label = std::move(label);
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = rhs - lhs;
  r.n = n;
  r.t = t;
  r.inputs = std::move(inputs);
  return r;
}

FixedPointResult resolve_fixed_point(const SpaceModel& space, const LipschitzMap& map,
                                     const Point& start, double tol, std::size_t max_iter,
                                     const char* which) {
  if (map.declared_k() < 1.0) return banach_fixed_point(space, map, start, tol, max_iter);
  if (map.declared_k() <= 1.0 + kUnitTol) {
    if (auto fp = known_fixed_point(space, map, start)) {
      const double step = distance(space, *fp, apply(space, map, *fp));
      return FixedPointResult{*fp, 0, step, step <= tol};
    }
  }
  throw GeometryError(std::string(which) +
                      " must be a strict contraction or nonexpansive with a known fixed point");
}

}  // namespace

void QtConfig::validate(const SpaceModel& space) const {
  if (!(t >= 0.0 && t <= 1.0)) throw GeometryError("blend weight t must lie in [0, 1]");
  validate_map(space, S);
  validate_map(space, T);
}

Point qt_apply(const SpaceModel& space, const QtConfig& cfg, const Point& a, const Point& b) {
  return combine(space, a, b, cfg.t);
}

BoundCheckRecord check_two_map_bound(const SpaceModel& space, const QtConfig& cfg, const Point& p,
                                     const Point& q, const Point& x, const Point& y) {
  return check_iterated_bound(space, cfg, p, q, x, y, 1);
}

BoundCheckRecord check_iterated_bound(const SpaceModel& space, const QtConfig& cfg, const Point& p,
                                      const Point& q, const Point& x, const Point& y,
                                      std::size_t n) {
  if (n < 1) throw GeometryError("iterated bound needs n >= 1");
  cfg.validate(space);
  const Images im{apply_power(space, cfg.S, p, n),
                  apply_power(space, cfg.S, q, n),
                  apply_power(space, cfg.T, x, n),
                  apply_power(space, cfg.T, y, n),
                  std::pow(cfg.S.declared_k(), static_cast<double>(n)),
                  std::pow(cfg.T.declared_k(), static_cast<double>(n))};
  BoundCheckRecord r = two_map_record(space, cfg.t, im, p, q, x, y);
  r.label = n == 1 ? "two_map" : "iterated";
  r.n = n;
  return r;
}

std::string to_string(DecayRegime regime) {
  switch (regime) {
    case DecayRegime::strict:
      return "strict";
    case DecayRegime::s_contracts:
      return "s_contracts";
    case DecayRegime::t_contracts:
      return "t_contracts";
    case DecayRegime::unsupported:
      return "unsupported";
  }
  return "unknown";
}

DecayReport check_decay(const SpaceModel& space, const QtConfig& cfg, const Point& p,
                        const Point& q, const Point& x, const Point& y, std::size_t n_max,
                        double tol) {
  if (n_max < 1) throw GeometryError("decay check needs n_max >= 1");
  cfg.validate(space);
  auto d = [&](const Point& a, const Point& b) { return distance(space, a, b); };

  const double ks = cfg.S.declared_k();
  const double kt = cfg.T.declared_k();
  const bool s_unit = std::abs(ks - 1.0) <= kUnitTol;
  const bool t_unit = std::abs(kt - 1.0) <= kUnitTol;
  DecayReport report;
  if (ks < 1.0 && kt < 1.0) {
    report.regime = DecayRegime::strict;
  } else if (ks < 1.0 && t_unit && known_fixed_point(space, cfg.T, x)) {
    report.regime = DecayRegime::s_contracts;
  } else if (kt < 1.0 && s_unit && known_fixed_point(space, cfg.S, p)) {
    report.regime = DecayRegime::t_contracts;
  }

  const double floor =
      std::min(sq(cfg.t), sq(1.0 - cfg.t)) * std::max(sq(d(x, y)), sq(d(p, q)));
  Images im{space.canonical(p), space.canonical(q), space.canonical(x), space.canonical(y), 1.0, 1.0};
  for (std::size_t n = 1; n <= n_max; ++n) {
    im.sp = apply(space, cfg.S, im.sp);
    im.sq = apply(space, cfg.S, im.sq);
    im.tx = apply(space, cfg.T, im.tx);
    im.ty = apply(space, cfg.T, im.ty);
    im.ks *= ks;
    im.kt *= kt;
    const double dn = d(combine(space, im.sp, im.tx, cfg.t), combine(space, im.sq, im.ty, cfg.t));
    if (report.regime == DecayRegime::strict || report.regime == DecayRegime::unsupported) {
      const BoundCheckRecord bound = two_map_record(space, cfg.t, im, p, q, x, y);
      report.records.push_back(
          first_power_record("decay", dn, std::sqrt(std::max(bound.rhs, 0.0)), n, cfg.t, {p, q, x, y}));
    } else {
      report.records.push_back(first_power_record("decay", sq(dn), floor, n, cfg.t, {p, q, x, y}));
    }
    report.final_distance = dn;
  }

  const std::size_t tail = std::max<std::size_t>(1, (n_max + 9) / 10);
  report.tail_limsup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = report.records.size() - tail; i < report.records.size(); ++i)
    report.tail_limsup = std::max(report.tail_limsup, -report.records[i].residual);

  // Least-squares slope of log d_n over the positive terms.
  double sn = 0, sy = 0, snn = 0, sny = 0;
  std::size_t cnt = 0;
  for (const auto& r : report.records) {
    const double dn = report.regime == DecayRegime::strict || report.regime == DecayRegime::unsupported
                          ? r.lhs
                          : std::sqrt(r.lhs);
    if (!(dn > 0.0)) continue;
    const double nn = static_cast<double>(r.n);
    const double ly = std::log(dn);
    sn += nn;
    sy += ly;
    snn += nn * nn;
    sny += nn * ly;
    ++cnt;
  }
  const double denom = static_cast<double>(cnt) * snn - sn * sn;
  report.log_slope = cnt >= 2 && denom != 0.0 ? (static_cast<double>(cnt) * sny - sn * sy) / denom
                                              : std::numeric_limits<double>::quiet_NaN();

  switch (report.regime) {
    case DecayRegime::strict:
      report.status = report.final_distance <= tol ? AuditStatus::passed : AuditStatus::violated;
      break;
    case DecayRegime::s_contracts:
    case DecayRegime::t_contracts:
      report.status = report.tail_limsup <= tol ? AuditStatus::passed : AuditStatus::violated;
      break;
    case DecayRegime::unsupported:
      report.status = AuditStatus::inconclusive;
      report.note = "needs both maps strictly contractive, or one strict and the other "
                    "nonexpansive (K = 1) with a known fixed point";
      break;
  }
  return report;
}

std::vector<BoundCheckRecord> check_slice_bounds(const SpaceModel& space, const QtConfig& cfg,
                                                 const Point& p, const Point& q, const Point& x,
                                                 const Point& y, std::size_t n, std::size_t m) {
  cfg.validate(space);
  auto d = [&](const Point& a, const Point& b) { return distance(space, a, b); };
  const double t = cfg.t;
  const double ks = cfg.S.declared_k();
  const double kt = cfg.T.declared_k();
  const double dxy = d(x, y);
  const double dpq = d(p, q);
  const std::vector<Point> inputs{p, q, x, y};

  const Point smp = apply_power(space, cfg.S, p, m);
  const Point tmx = apply_power(space, cfg.T, x, m);
  std::vector<BoundCheckRecord> out;

  out.push_back(first_power_record(
      "slice_t_1",
      d(combine(space, smp, apply(space, cfg.T, x), t), combine(space, smp, apply(space, cfg.T, y), t)),
      (1.0 - t) * kt * dxy, 1, t, inputs));
  out.push_back(first_power_record(
      "slice_t_n",
      d(combine(space, smp, apply_power(space, cfg.T, x, n), t),
        combine(space, smp, apply_power(space, cfg.T, y, n), t)),
      (1.0 - t) * std::pow(kt, static_cast<double>(n)) * dxy, n, t, inputs));
  out.push_back(first_power_record(
      "slice_s_1",
      d(combine(space, apply(space, cfg.S, p), tmx, t), combine(space, apply(space, cfg.S, q), tmx, t)),
      t * ks * dpq, 1, t, inputs));
  out.push_back(first_power_record(
      "slice_s_n",
      d(combine(space, apply_power(space, cfg.S, p, n), tmx, t),
        combine(space, apply_power(space, cfg.S, q, n), tmx, t)),
      t * std::pow(ks, static_cast<double>(n)) * dpq, n, t, inputs));
  return out;
}

ZtResult compute_zt(const SpaceModel& space, const QtConfig& cfg, const Point& p0, const Point& x0,
                    double tol, std::size_t max_iter) {
  cfg.validate(space);
  ZtResult r;
  r.s_fixed = resolve_fixed_point(space, cfg.S, p0, tol, max_iter, "S");
  r.t_fixed = resolve_fixed_point(space, cfg.T, x0, tol, max_iter, "T");
  const Point& ps = r.s_fixed.point;
  const Point& ys = r.t_fixed.point;
  r.z.point = combine(space, ps, ys, cfg.t);
  r.z.iterations = r.s_fixed.iterations + r.t_fixed.iterations;
  r.z.final_step = std::max(r.s_fixed.final_step, r.t_fixed.final_step);
  r.z.converged = r.s_fixed.converged && r.t_fixed.converged;
  r.endpoint_zero = distance(space, combine(space, ps, ys, 0.0), ys);
  r.endpoint_one = distance(space, combine(space, ps, ys, 1.0), ps);
  return r;
}

}  // namespace cat0lab
