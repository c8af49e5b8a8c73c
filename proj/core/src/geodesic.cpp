#include "cat0lab/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cat0lab/sampling.hpp"
#include "mobius.hpp"

namespace cat0lab {
namespace {

void require_pair(const SpaceModel& space, const Point& x, const Point& y) {
  if (x.space_id != y.space_id) throw GeometryError("points belong to different spaces");
  space.require(x);
  space.require(y);
}

void require_weight(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw GeometryError("blend weight t must lie in [0, 1]");
}

// --- Euclidean -------------------------------------------------------------

double euclidean_distance(const EuclideanCoords& x, const EuclideanCoords& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// --- Poincare disk ---------------------------------------------------------

using detail::from_origin;
using detail::to_origin;

double disk_distance(DiskCoord x, DiskCoord y) {
  return 2.0 * std::atanh(std::min(std::abs(to_origin(x, y)), kDiskNormLimit));
}

DiskCoord disk_combine(DiskCoord x, DiskCoord y, double t) {
  const DiskCoord u = to_origin(x, y);
  const double r = std::abs(u);
  if (r == 0.0) return x;
  // Hyperbolic distance from the origin scales by (1 - t); tanh(d/2) is the
  // Euclidean radius of the image.
  const double target = std::tanh((1.0 - t) * std::atanh(std::min(r, kDiskNormLimit)));
  return from_origin(x, u * (target / r));
}

// --- metric tree -----------------------------------------------------------

struct Exit {
  std::size_t node;
  double cost;
  double offset;  // edge coordinate of the node on the point's own edge
};

std::vector<Exit> exits(const MetricTree& tree, const TreePoint& p) {
  if (p.on_node()) return {{static_cast<std::size_t>(p.node), 0.0, 0.0}};
  const auto& ed = tree.edge(static_cast<std::size_t>(p.edge));
  return {{ed.a, p.offset, 0.0}, {ed.b, ed.length - p.offset, ed.length}};
}

// A piece of the geodesic lying on one edge, in that edge's coordinates.
struct Leg {
  std::size_t edge;
  double from;
  double to;
  double length() const { return std::abs(to - from); }
};

std::vector<Leg> tree_route(const MetricTree& tree, const TreePoint& x, const TreePoint& y) {
  if (!x.on_node() && !y.on_node() && x.edge == y.edge)
    return {{static_cast<std::size_t>(x.edge), x.offset, y.offset}};

  const auto ex = exits(tree, x);
  const auto ey = exits(tree, y);
  const Exit* bx = nullptr;
  const Exit* by = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : ex)
    for (const auto& b : ey) {
      const double c = a.cost + tree.node_distance(a.node, b.node) + b.cost;
      if (c < best) {
        best = c;
        bx = &a;
        by = &b;
      }
    }

  std::vector<Leg> legs;
  if (!x.on_node()) legs.push_back({static_cast<std::size_t>(x.edge), x.offset, bx->offset});
  std::size_t at = bx->node;
  for (std::size_t e : tree.edge_path(bx->node, by->node)) {
    const auto& ed = tree.edge(e);
    if (ed.a == at) {
      legs.push_back({e, 0.0, ed.length});
    } else {
      legs.push_back({e, ed.length, 0.0});
    }
    at = tree.other_end(e, at);
  }
  if (!y.on_node()) legs.push_back({static_cast<std::size_t>(y.edge), by->offset, y.offset});
  return legs;
}

double tree_distance(const MetricTree& tree, const TreePoint& x, const TreePoint& y) {
  if (!x.on_node() && !y.on_node() && x.edge == y.edge) return std::abs(x.offset - y.offset);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : exits(tree, x))
    for (const auto& b : exits(tree, y))
      best = std::min(best, a.cost + tree.node_distance(a.node, b.node) + b.cost);
  return best;
}

Point tree_combine(const SpaceModel& space, const Point& x, const Point& y, double t) {
  const auto& tree = space.tree();
  const auto legs = tree_route(tree, x.tree(), y.tree());
  double total = 0.0;
  for (const auto& l : legs) total += l.length();
  double remaining = (1.0 - t) * total;
  for (const auto& l : legs) {
    const double len = l.length();
    if (remaining <= len) {
      const double off = l.to >= l.from ? l.from + remaining : l.from - remaining;
      return space.on_edge(l.edge, std::clamp(off, 0.0, tree.edge(l.edge).length));
    }
    remaining -= len;
  }
  return y;
}

}  // namespace

double distance(const SpaceModel& space, const Point& x, const Point& y) {
  require_pair(space, x, y);
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return euclidean_distance(x.coords(), y.coords());
    case SpaceKind::disk:
      return disk_distance(x.disk(), y.disk());
    case SpaceKind::tree:
      return tree_distance(space.tree(), space.canonical(x).tree(), space.canonical(y).tree());
  }
  return 0.0;
}

Point combine(const SpaceModel& space, const Point& x, const Point& y, double t) {
  require_pair(space, x, y);
  require_weight(t);
  if (t == 1.0) return space.canonical(x);
  if (t == 0.0) return space.canonical(y);
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      const auto& a = x.coords();
      const auto& b = y.coords();
      EuclideanCoords out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = t * a[i] + (1.0 - t) * b[i];
      return Point{space.id(), std::move(out)};
    }
    case SpaceKind::disk:
      return space.disk_point(disk_combine(x.disk(), y.disk(), t));
    case SpaceKind::tree:
      return tree_combine(space, space.canonical(x), space.canonical(y), t);
  }
  return x;
}

Point midpoint(const SpaceModel& space, const Point& x, const Point& y) {
  return combine(space, x, y, 0.5);
}

bool validate_point(const SpaceModel& space, const Point& x) {
  try {
    space.require(x);
    return true;
  } catch (const GeometryError&) {
    return false;
  }
}

ViolationReport audit_metric_axioms(const SpaceModel& space, std::size_t sample_count,
                                    std::uint64_t seed) {
  if (sample_count == 0) throw GeometryError("sample_count must be >= 1");
  ViolationReport report;
  report.check = "metric_axioms";
  report.space = space.name();
  report.p = "-";
  report.tol = default_tolerance(space);
  double worst_sym = 0.0, worst_nonneg = 0.0, worst_identity = 0.0;
  double worst_triangle = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample_count; ++i) {
    Rng rng = substream(seed, i);
    AuditSample s;
    for (int k = 0; k < 3; ++k) s.points.push_back(sample_point(space, rng));
    const auto& x = s.points[0];
    const auto& y = s.points[1];
    const auto& z = s.points[2];
    const double dxy = distance(space, x, y);
    const double sym = -std::abs(dxy - distance(space, y, x));
    const double nonneg = std::min(dxy, 0.0);
    const double identity = -std::abs(distance(space, x, x));
    const double triangle = dxy + distance(space, y, z) - distance(space, x, z);
    worst_sym = std::min(worst_sym, sym);
    worst_nonneg = std::min(worst_nonneg, nonneg);
    worst_identity = std::min(worst_identity, identity);
    worst_triangle = std::min(worst_triangle, triangle);
    report.observe(std::min({sym, nonneg, identity, triangle}), s);
  }
  report.details["symmetry"] = worst_sym;
  report.details["nonnegativity"] = worst_nonneg;
  report.details["identity"] = worst_identity;
  report.details["triangle"] = worst_triangle;
  report.finish();
  return report;
}

}  // namespace cat0lab
