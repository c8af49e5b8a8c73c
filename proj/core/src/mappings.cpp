#include "cat0lab/mappings.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "cat0lab/geodesic.hpp"
#include "cat0lab/sampling.hpp"
#include "mobius.hpp"

namespace cat0lab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> as_matrix(
    const maps::Affine& a) {
  const auto n = static_cast<Eigen::Index>(a.offset.size());
  return {a.matrix.data(), n, n};
}

double spectral_norm(const maps::Affine& a) {
  if (a.offset.empty()) return 0.0;
  Eigen::MatrixXd m = as_matrix(a);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

Point apply_tree_automorphism(const SpaceModel& space, const maps::TreeAutomorphism& f,
                              const Point& x) {
  const auto& tree = space.tree();
  const TreePoint p = space.canonical(x).tree();
  if (p.on_node()) return space.node(f.node_image.at(static_cast<std::size_t>(p.node)));
  const auto& ed = tree.edge(static_cast<std::size_t>(p.edge));
  const std::size_t a = f.node_image.at(ed.a);
  const std::size_t b = f.node_image.at(ed.b);
  const auto image = static_cast<std::size_t>(tree.edge_between(a, b));
  const auto& target = tree.edge(image);
  return space.on_edge(image, target.a == a ? p.offset : target.length - p.offset);
}

}  // namespace

LipschitzMap LipschitzMap::identity() { return LipschitzMap(maps::Identity{}, 1.0); }

LipschitzMap LipschitzMap::contraction(Point anchor, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0))
    throw GeometryError("geodesic contraction factor must lie in [0, 1]");
  return LipschitzMap(maps::GeodesicContraction{std::move(anchor), factor}, factor);
}

LipschitzMap LipschitzMap::rotation(Point center, double angle, std::size_t axis_i,
                                    std::size_t axis_j) {
  if (!std::isfinite(angle)) throw GeometryError("rotation angle must be finite");
  return LipschitzMap(maps::Rotation{std::move(center), angle, axis_i, axis_j}, 1.0);
}

LipschitzMap LipschitzMap::tree_automorphism(const SpaceModel& space,
                                             std::vector<std::size_t> node_image) {
  LipschitzMap m(maps::TreeAutomorphism{std::move(node_image)}, 1.0);
  validate_map(space, m);
  return m;
}

LipschitzMap LipschitzMap::ball_projection(Point center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("ball projection radius must be > 0");
  return LipschitzMap(maps::BallProjection{std::move(center), radius}, 1.0);
}

LipschitzMap LipschitzMap::affine(std::vector<double> matrix, std::vector<double> offset) {
  if (offset.empty() || matrix.size() != offset.size() * offset.size())
    throw GeometryError("affine map needs an n x n matrix and an n-vector");
  maps::Affine a{std::move(matrix), std::move(offset)};
  const double k = spectral_norm(a);
  return LipschitzMap(std::move(a), k);
}

LipschitzMap LipschitzMap::compose(std::vector<LipschitzMap> parts) {
  double k = 1.0;
  for (const auto& p : parts) k *= p.declared_k();
  return LipschitzMap(maps::Compose{std::move(parts)}, k);
}

LipschitzMap LipschitzMap::with_declared_k(double k) const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw GeometryError("declared_k must be finite and >= 0");
  LipschitzMap copy = *this;
  copy.declared_k_ = k;
  return copy;
}

std::string LipschitzMap::kind_name() const {
  return std::visit(Overloaded{
                        [](const maps::Identity&) { return std::string("identity"); },
                        [](const maps::GeodesicContraction&) { return std::string("contraction"); },
                        [](const maps::Rotation&) { return std::string("isometry"); },
                        [](const maps::TreeAutomorphism&) { return std::string("isometry"); },
                        [](const maps::BallProjection&) { return std::string("ball_projection"); },
                        [](const maps::Affine&) { return std::string("affine"); },
                        [](const maps::Compose&) { return std::string("compose"); },
                    },
                    kind_);
}

void validate_map(const SpaceModel& space, const LipschitzMap& map) {
  std::visit(
      Overloaded{
          [](const maps::Identity&) {},
          [&](const maps::GeodesicContraction& c) { space.require(c.anchor); },
          [&](const maps::Rotation& r) {
            space.require(r.center);
            if (space.kind() == SpaceKind::tree)
              throw GeometryError("tree isometries are given as node permutations");
            if (space.kind() == SpaceKind::euclidean) {
              if (space.dimension() == 1) {
                if (std::abs(std::abs(std::cos(r.angle)) - 1.0) > 1e-12)
                  throw GeometryError("in dimension 1 a rotation must be the identity or a reflection");
              } else if (r.axis_i == r.axis_j || r.axis_i >= space.dimension() ||
                         r.axis_j >= space.dimension()) {
                throw GeometryError("rotation axes must be two distinct coordinates");
              }
            }
          },
          [&](const maps::TreeAutomorphism& f) {
            const auto& tree = space.tree();
            const std::size_t n = tree.node_count();
            if (f.node_image.size() != n) throw GeometryError("automorphism must map every node");
            std::vector<bool> seen(n, false);
            for (std::size_t v : f.node_image) {
              if (v >= n || seen[v]) throw GeometryError("automorphism is not a permutation");
              seen[v] = true;
            }
            for (const auto& ed : tree.edges()) {
              const auto image = tree.edge_between(f.node_image[ed.a], f.node_image[ed.b]);
              if (image < 0 || tree.edge(static_cast<std::size_t>(image)).length != ed.length)
                throw GeometryError("permutation does not preserve the weighted edges");
            }
          },
          [&](const maps::BallProjection& b) { space.require(b.center); },
          [&](const maps::Affine& a) {
            if (space.kind() != SpaceKind::euclidean || a.offset.size() != space.dimension())
              throw GeometryError("affine map dimension does not match the space");
          },
          [&](const maps::Compose& c) {
            for (const auto& part : c.maps) validate_map(space, part);
          },
      },
      map.kind());
}

Point apply(const SpaceModel& space, const LipschitzMap& map, const Point& x) {
  space.require(x);
  return std::visit(
      Overloaded{
          [&](const maps::Identity&) { return space.canonical(x); },
          [&](const maps::GeodesicContraction& c) { return combine(space, x, c.anchor, c.factor); },
          [&](const maps::Rotation& r) -> Point {
            space.require(r.center);
            if (space.kind() == SpaceKind::disk) {
              const DiskCoord c = r.center.disk();
              const DiskCoord w = std::polar(1.0, r.angle) * detail::to_origin(c, x.disk());
              return space.disk_point(detail::from_origin(c, w));
            }
            if (space.kind() != SpaceKind::euclidean)
              throw GeometryError("rotation is defined on Euclidean spaces and the disk");
            EuclideanCoords out = x.coords();
            const auto& c = r.center.coords();
            if (space.dimension() == 1) {
              out[0] = c[0] + std::round(std::cos(r.angle)) * (out[0] - c[0]);
              return Point{space.id(), std::move(out)};
            }
            const double u = out[r.axis_i] - c[r.axis_i];
            const double v = out[r.axis_j] - c[r.axis_j];
            const double cs = std::cos(r.angle), sn = std::sin(r.angle);
            out[r.axis_i] = c[r.axis_i] + cs * u - sn * v;
            out[r.axis_j] = c[r.axis_j] + sn * u + cs * v;
            return Point{space.id(), std::move(out)};
          },
          [&](const maps::TreeAutomorphism& f) { return apply_tree_automorphism(space, f, x); },
          [&](const maps::BallProjection& b) {
            const double d = distance(space, x, b.center);
            if (d <= b.radius) return space.canonical(x);
            return combine(space, x, b.center, b.radius / d);
          },
          [&](const maps::Affine& a) -> Point {
            if (space.kind() != SpaceKind::euclidean || a.offset.size() != space.dimension())
              throw GeometryError("affine map dimension does not match the space");
            const auto n = static_cast<Eigen::Index>(a.offset.size());
            const Eigen::Map<const Eigen::VectorXd> xv(x.coords().data(), n);
            const Eigen::Map<const Eigen::VectorXd> b(a.offset.data(), n);
            const Eigen::VectorXd y = as_matrix(a) * xv + b;
            return space.point(EuclideanCoords(y.data(), y.data() + n));
          },
          [&](const maps::Compose& c) {
            Point y = space.canonical(x);
            for (const auto& part : c.maps) y = apply(space, part, y);
            return y;
          },
      },
      map.kind());
}

std::vector<Point> iterate(const SpaceModel& space, const LipschitzMap& map, const Point& x,
                           std::size_t n) {
  std::vector<Point> orbit;
  orbit.reserve(n + 1);
  orbit.push_back(space.canonical(x));
  for (std::size_t k = 0; k < n; ++k) orbit.push_back(apply(space, map, orbit.back()));
  return orbit;
}

Point apply_power(const SpaceModel& space, const LipschitzMap& map, const Point& x, std::size_t n) {
  Point y = space.canonical(x);
  for (std::size_t k = 0; k < n; ++k) y = apply(space, map, y);
  return y;
}

LipschitzEstimate estimate_lipschitz(const SpaceModel& space, const LipschitzMap& map,
                                     const AuditSpec& spec) {
  spec.validate();
  validate_map(space, map);
  LipschitzEstimate est;
  est.declared_k = map.declared_k();
  double best = -1.0;
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    Rng rng = substream(spec.seed, i);
    Point x = sample_point(space, rng);
    Point y = i % 2 == 0 ? sample_point(space, rng) : sample_near(space, x, 0.01, rng);
    const double dxy = distance(space, x, y);
    if (dxy == 0.0) continue;
    ++est.pairs;
    const double ratio = distance(space, apply(space, map, x), apply(space, map, y)) / dxy;
    if (ratio > best) {
      best = ratio;
      est.witness = AuditSample{{std::move(x), std::move(y)}, 0.0};
    }
  }
  if (est.pairs == 0) return est;
  est.k_hat = best;
  est.status = best <= est.declared_k + spec.tol ? AuditStatus::passed : AuditStatus::violated;
  return est;
}

FixedPointResult banach_fixed_point(const SpaceModel& space, const LipschitzMap& map,
                                    const Point& x0, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw GeometryError("fixed-point tolerance must be > 0");
  FixedPointResult r{space.canonical(x0), 0, 0.0, false};
  while (r.iterations < max_iter) {
    Point next = apply(space, map, r.point);
    r.final_step = distance(space, r.point, next);
    r.point = std::move(next);
    ++r.iterations;
    if (r.final_step <= tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::optional<Point> known_fixed_point(const SpaceModel& space, const LipschitzMap& map,
                                       const Point& hint) {
  return std::visit(
      Overloaded{
          [&](const maps::Identity&) -> std::optional<Point> { return space.canonical(hint); },
          [&](const maps::GeodesicContraction& c) -> std::optional<Point> { return c.anchor; },
          [&](const maps::Rotation& r) -> std::optional<Point> { return r.center; },
          [&](const maps::TreeAutomorphism& f) -> std::optional<Point> {
            const auto& tree = space.tree();
            for (std::size_t v = 0; v < f.node_image.size(); ++v)
              if (f.node_image[v] == v) return space.node(v);
            for (std::size_t e = 0; e < tree.edge_count(); ++e) {
              const auto& ed = tree.edge(e);
              if (f.node_image[ed.a] == ed.b && f.node_image[ed.b] == ed.a)
                return space.on_edge(e, 0.5 * ed.length);
            }
            return std::nullopt;
          },
          [&](const maps::BallProjection& b) -> std::optional<Point> { return b.center; },
          [&](const maps::Affine& a) -> std::optional<Point> {
            const auto n = static_cast<Eigen::Index>(a.offset.size());
            const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd(as_matrix(a));
            const Eigen::Map<const Eigen::VectorXd> b(a.offset.data(), n);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
            if (!lu.isInvertible()) return std::nullopt;
            const Eigen::VectorXd x = lu.solve(b);
            return space.point(EuclideanCoords(x.data(), x.data() + n));
          },
          [&](const maps::Compose&) -> std::optional<Point> { return std::nullopt; },
      },
      map.kind());
}

}  // namespace cat0lab
