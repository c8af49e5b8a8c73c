#include "cat0lab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cat0lab/geodesic.hpp"
#include "mobius.hpp"

namespace cat0lab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Fraction of the radius to use: a quarter of the draws land on the shell
// (extremal configurations of ball constraints live there), the rest fill the
// ball with density ~ rho^(dim-1).
double radial_fraction(Rng& rng, double dim) {
  if (uniform(rng) < 0.25) return 1.0 - 1e-12;
  return std::pow(uniform(rng), 1.0 / dim);
}

// Walks `budget` along the tree without backtracking, choosing branches at
// random. `arrived_by` excludes an edge at a starting node; `forced` fixes the
// first direction when starting inside an edge (true = toward b).
Point tree_walk(const SpaceModel& space, const Point& start, double budget, Rng& rng,
                std::int64_t arrived_by = -1, int forced = -1) {
  const auto& tree = space.tree();
  TreePoint at = space.canonical(start).tree();
  while (budget > 0.0) {
    if (!at.on_node()) {
      const auto e = static_cast<std::size_t>(at.edge);
      const auto& ed = tree.edge(e);
      const bool toward_b = forced >= 0 ? forced == 1 : uniform(rng) < 0.5;
      forced = -1;
      const double room = toward_b ? ed.length - at.offset : at.offset;
      if (budget < room) return space.on_edge(e, toward_b ? at.offset + budget : at.offset - budget);
      budget -= room;
      at = TreePoint{static_cast<std::int32_t>(toward_b ? ed.b : ed.a), -1, 0.0};
      arrived_by = static_cast<std::int64_t>(e);
      continue;
    }
    const auto v = static_cast<std::size_t>(at.node);
    std::vector<std::size_t> options;
    for (std::size_t e : tree.incident(v))
      if (static_cast<std::int64_t>(e) != arrived_by) options.push_back(e);
    if (options.empty()) break;
    const std::size_t e = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    const auto& ed = tree.edge(e);
    const bool from_a = ed.a == v;
    if (budget < ed.length) return space.on_edge(e, from_a ? budget : ed.length - budget);
    budget -= ed.length;
    at = TreePoint{static_cast<std::int32_t>(tree.other_end(e, v)), -1, 0.0};
    arrived_by = static_cast<std::int64_t>(e);
  }
  return Point{space.id(), at};
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

Point sample_point(const SpaceModel& space, Rng& rng) {
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      EuclideanCoords c(space.dimension());
      for (auto& v : c) v = uniform(rng, -1.0, 1.0);
      return Point{space.id(), std::move(c)};
    }
    case SpaceKind::disk: {
      const double r = 0.9 * std::sqrt(uniform(rng));
      const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      return Point{space.id(), std::polar(r, phi)};
    }
    case SpaceKind::tree: {
      const auto& tree = space.tree();
      if (tree.edge_count() == 0) return space.node(std::size_t{0});
      double pick = uniform(rng, 0.0, tree.total_length());
      for (std::size_t e = 0; e < tree.edge_count(); ++e) {
        const double len = tree.edge(e).length;
        if (pick < len || e + 1 == tree.edge_count())
          return space.on_edge(e, std::clamp(pick, 0.0, len));
        pick -= len;
      }
    }
  }
  throw GeometryError("unsupported space");
}

Point sample_near(const SpaceModel& space, const Point& center, double radius, Rng& rng) {
  space.require(center);
  if (!(radius >= 0.0)) throw GeometryError("radius must be >= 0");
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      const std::size_t n = space.dimension();
      std::normal_distribution<double> gauss;
      std::vector<double> dir(n);
      double norm = 0.0;
      while (norm == 0.0) {
        norm = 0.0;
        for (auto& v : dir) {
          v = gauss(rng);
          norm += v * v;
        }
        norm = std::sqrt(norm);
      }
      const double rho = radius * radial_fraction(rng, static_cast<double>(n));
      EuclideanCoords c = center.coords();
      for (std::size_t i = 0; i < n; ++i) c[i] += rho * dir[i] / norm;
      return Point{space.id(), std::move(c)};
    }
    case SpaceKind::disk: {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const double rho = radius * radial_fraction(rng, 2.0);
        const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const DiskCoord z = detail::from_origin(center.disk(), std::polar(std::tanh(0.5 * rho), phi));
        if (std::abs(z) < kDiskNormLimit) return Point{space.id(), z};
      }
      return center;
    }
    case SpaceKind::tree:
      return tree_walk(space, center, radius * radial_fraction(rng, 1.0), rng);
  }
  throw GeometryError("unsupported space");
}

Point antipode(const SpaceModel& space, const Point& center, const Point& x, Rng& rng) {
  space.require(center);
  space.require(x);
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      EuclideanCoords c = center.coords();
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2.0 * c[i] - x.coords()[i];
      return Point{space.id(), std::move(c)};
    }
    case SpaceKind::disk: {
      const DiskCoord w = -detail::to_origin(center.disk(), x.disk());
      const DiskCoord z = detail::from_origin(center.disk(), w);
      return std::abs(z) < kDiskNormLimit ? Point{space.id(), z} : center;
    }
    case SpaceKind::tree: {
      const auto& tree = space.tree();
      const Point c = space.canonical(center);
      const Point xc = space.canonical(x);
      const TreePoint& tc = c.tree();
      const double d = distance(space, c, xc);
      if (d == 0.0) return c;
      if (tc.on_node()) {
        const auto v = static_cast<std::size_t>(tc.node);
        std::int64_t toward_x = -1;
        for (std::size_t e : tree.incident(v)) {
          const auto& ed = tree.edge(e);
          const double s = 0.5 * ed.length;
          if (distance(space, space.on_edge(e, ed.a == v ? s : ed.length - s), xc) < d)
            toward_x = static_cast<std::int64_t>(e);
        }
        return tree_walk(space, c, d, rng, toward_x);
      }
      const auto& ed = tree.edge(static_cast<std::size_t>(tc.edge));
      const Point nudge = space.on_edge(static_cast<std::size_t>(tc.edge),
                                        0.5 * (tc.offset + ed.length));
      const bool x_toward_b = distance(space, nudge, xc) < d;
      return tree_walk(space, c, d, rng, -1, x_toward_b ? 0 : 1);
    }
  }
  throw GeometryError("unsupported space");
}

std::vector<Point> local_moves(const SpaceModel& space, const Point& x, double step) {
  std::vector<Point> out;
  switch (space.kind()) {
    case SpaceKind::euclidean: {
      for (std::size_t i = 0; i < space.dimension(); ++i)
        for (double sgn : {1.0, -1.0}) {
          EuclideanCoords c = x.coords();
          c[i] += sgn * step;
          out.push_back(Point{space.id(), std::move(c)});
        }
      return out;
    }
    case SpaceKind::disk: {
      const DiskCoord z = x.disk();
      const double h = 0.5 * step * (1.0 - std::norm(z));
      for (DiskCoord d : {DiskCoord(h, 0), DiskCoord(-h, 0), DiskCoord(0, h), DiskCoord(0, -h)}) {
        const DiskCoord w = z + d;
        if (std::abs(w) < kDiskNormLimit) out.push_back(Point{space.id(), w});
      }
      return out;
    }
    case SpaceKind::tree: {
      const auto& tree = space.tree();
      const TreePoint p = space.canonical(x).tree();
      if (p.on_node()) {
        const auto v = static_cast<std::size_t>(p.node);
        for (std::size_t e : tree.incident(v)) {
          const auto& ed = tree.edge(e);
          const double s = std::min(step, ed.length);
          out.push_back(space.on_edge(e, ed.a == v ? s : ed.length - s));
        }
      } else {
        const auto e = static_cast<std::size_t>(p.edge);
        const double len = tree.edge(e).length;
        out.push_back(space.on_edge(e, std::max(0.0, p.offset - step)));
        out.push_back(space.on_edge(e, std::min(len, p.offset + step)));
      }
      return out;
    }
  }
  return out;
}

}  // namespace cat0lab
