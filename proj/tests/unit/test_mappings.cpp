#include <doctest.h>

#include <cmath>

#include "cat0lab/geodesic.hpp"
#include "cat0lab/mappings.hpp"
#include "cat0lab/sampling.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cat0lab;

namespace {

AuditSpec lip_spec(std::size_t n = 10000, std::uint64_t seed = 42) {
  AuditSpec s;
  s.sample_count = n;
  s.seed = seed;
  return s;
}

/// Maps every model supports, plus the model-specific isometries.
std::vector<LipschitzMap> catalogue(const SpaceModel& space) {
  Rng rng = substream(1234, 0);
  const Point c = sample_point(space, rng);
  std::vector<LipschitzMap> out{LipschitzMap::identity(), LipschitzMap::contraction(c, 0.3),
                                LipschitzMap::contraction(c, 0.9),
                                LipschitzMap::ball_projection(c, 0.4)};
  if (space.kind() == SpaceKind::euclidean) {
    out.push_back(LipschitzMap::rotation(c, 0.7));
    std::vector<double> a(space.dimension() * space.dimension(), 0.0);
    for (std::size_t i = 0; i < space.dimension(); ++i) {
      a[i * space.dimension() + i] = 0.6;
      if (i + 1 < space.dimension()) a[i * space.dimension() + i + 1] = 0.3;
    }
    out.push_back(LipschitzMap::affine(a, std::vector<double>(space.dimension(), 0.1)));
  } else if (space.kind() == SpaceKind::disk) {
    out.push_back(LipschitzMap::rotation(c, 1.1));
  }
  out.push_back(LipschitzMap::compose({out[1], out[3]}));
  return out;
}

}  // namespace

TEST_CASE("apply examples") {
  const auto e1 = SpaceModel::euclidean(1);
  CHECK(apply(e1, LipschitzMap::contraction(e1.point({0}), 0.5), e1.point({1})) == e1.point({0.5}));
  CHECK(apply(e1, LipschitzMap::ball_projection(e1.point({0}), 1.0), e1.point({3})) ==
        e1.point({1}));
  CHECK(apply(e1, LipschitzMap::ball_projection(e1.point({0}), 1.0), e1.point({0.5})) ==
        e1.point({0.5}));

  const auto star = fixtures::star3();
  const Point y = apply(star, LipschitzMap::contraction(star.node("c"), 0.5), star.node("a"));
  CHECK(y.tree().edge == 0);
  CHECK(y.tree().offset == doctest::Approx(0.5));

  const auto e2 = SpaceModel::euclidean(2);
  const Point r = apply(e2, LipschitzMap::rotation(e2.point({1, 1}), M_PI / 2), e2.point({2, 1}));
  CHECK(r.coords()[0] == doctest::Approx(1.0));
  CHECK(r.coords()[1] == doctest::Approx(2.0));

  const Point s = apply(e2, LipschitzMap::affine({2, 0, 0, 3}, {1, -1}), e2.point({1, 1}));
  CHECK(s == e2.point({3, 2}));

  // Reflection in dimension 1.
  CHECK(apply(e1, LipschitzMap::rotation(e1.point({1}), M_PI), e1.point({3})) == e1.point({-1}));

  // Disk rotation fixes the centre and preserves distance to it.
  const auto disk = SpaceModel::poincare_disk();
  const Point c = disk.disk_point({0.2, -0.3});
  const auto rot = LipschitzMap::rotation(c, 2.0);
  const Point x = disk.disk_point({-0.4, 0.1});
  CHECK(distance(disk, apply(disk, rot, c), c) <= 1e-12);
  CHECK(distance(disk, apply(disk, rot, x), c) == doctest::Approx(distance(disk, x, c)));
}

TEST_CASE("iterate examples") {
  const auto e1 = SpaceModel::euclidean(1);
  const auto orbit = iterate(e1, LipschitzMap::contraction(e1.point({0}), 0.5), e1.point({1}), 3);
  REQUIRE(orbit.size() == 4);
  const double expect[] = {1.0, 0.5, 0.25, 0.125};
  for (std::size_t i = 0; i < 4; ++i) CHECK(orbit[i].coords()[0] == expect[i]);

  const auto same = iterate(e1, LipschitzMap::identity(), e1.point({7}), 5);
  CHECK(same.size() == 6);
  for (const auto& p : same) CHECK(p == e1.point({7}));

  const auto star = fixtures::star3();
  const auto tree_orbit =
      iterate(star, LipschitzMap::contraction(star.node("c"), 0.5), star.node("a"), 2);
  const double offsets[] = {1.0, 0.5, 0.25};
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(distance(star, tree_orbit[i], star.node("c")) == doctest::Approx(offsets[i]));
  CHECK(apply_power(star, LipschitzMap::contraction(star.node("c"), 0.5), star.node("a"), 2) ==
        tree_orbit[2]);
  CHECK(apply_power(e1, LipschitzMap::identity(), e1.point({2}), 0) == e1.point({2}));
}

TEST_CASE("map construction and validation errors") {
  const auto e2 = SpaceModel::euclidean(2);
  const auto disk = SpaceModel::poincare_disk();
  const auto star = fixtures::star3();
  CHECK_THROWS_AS(LipschitzMap::contraction(e2.point({0, 0}), 1.5), GeometryError);
  CHECK_THROWS_AS(LipschitzMap::contraction(e2.point({0, 0}), -0.1), GeometryError);
  CHECK_THROWS_AS(LipschitzMap::ball_projection(e2.point({0, 0}), 0.0), GeometryError);
  CHECK_THROWS_AS(LipschitzMap::affine({1, 2, 3}, {0, 0}), GeometryError);
  CHECK_THROWS_AS(LipschitzMap::identity().with_declared_k(-1.0), GeometryError);
  CHECK_THROWS_AS(validate_map(disk, LipschitzMap::contraction(e2.point({0, 0}), 0.5)),
                  GeometryError);
  CHECK_THROWS_AS(validate_map(disk, LipschitzMap::affine({1, 0, 0, 1}, {0, 0})), GeometryError);
  CHECK_THROWS_AS(validate_map(e2, LipschitzMap::rotation(e2.point({0, 0}), 1.0, 1, 1)),
                  GeometryError);
  const auto e1 = SpaceModel::euclidean(1);
  CHECK_THROWS_AS(validate_map(e1, LipschitzMap::rotation(e1.point({0}), 1.0)), GeometryError);
  CHECK_THROWS_AS(validate_map(star, LipschitzMap::rotation(star.node("c"), 1.0)), GeometryError);

  // Tree automorphisms must be weighted-edge-preserving permutations.
  CHECK_NOTHROW(LipschitzMap::tree_automorphism(star, {0, 2, 1, 3}));
  CHECK_THROWS_AS(LipschitzMap::tree_automorphism(star, {1, 0, 2, 3}), GeometryError);
  CHECK_THROWS_AS(LipschitzMap::tree_automorphism(star, {0, 1, 1, 3}), GeometryError);
  CHECK_THROWS_AS(LipschitzMap::tree_automorphism(star, {0, 1, 2}), GeometryError);
  const auto lop = fixtures::lopsided();
  CHECK_THROWS_AS(LipschitzMap::tree_automorphism(lop, {0, 2, 1, 3, 4, 5}), GeometryError);

  CHECK(LipschitzMap::identity().kind_name() == "identity");
  CHECK(LipschitzMap::tree_automorphism(star, {0, 2, 1, 3}).kind_name() == "isometry");
  CHECK(LipschitzMap::compose({LipschitzMap::contraction(e2.point({0, 0}), 0.5),
                               LipschitzMap::contraction(e2.point({1, 0}), 0.4)})
            .declared_k() == doctest::Approx(0.2));
}

TEST_CASE("tree automorphism moves points along edges") {
  const auto path = fixtures::path4();
  const auto flip = LipschitzMap::tree_automorphism(path, {3, 2, 1, 0});
  CHECK(apply(path, flip, path.node("n0")) == path.node("n3"));
  const Point x = path.on_edge(0, 0.25);
  const Point fx = apply(path, flip, x);
  CHECK(distance(path, fx, path.node("n3")) == doctest::Approx(0.25));
  const auto fixed = known_fixed_point(path, flip, path.node("n0"));
  REQUIRE(fixed.has_value());
  CHECK(distance(path, *fixed, path.node("n1")) == doctest::Approx(0.5));
  CHECK(distance(path, apply(path, flip, *fixed), *fixed) <= 1e-12);
}

TEST_CASE("Lipschitz estimates") {
  const auto e2 = SpaceModel::euclidean(2);
  const auto half = estimate_lipschitz(e2, LipschitzMap::contraction(e2.point({0, 0}), 0.5),
                                       lip_spec());
  CHECK(half.passed());
  CHECK(std::abs(half.k_hat - 0.5) <= 1e-12);
  const auto rot = estimate_lipschitz(e2, LipschitzMap::rotation(e2.point({0, 0}), 1.0), lip_spec());
  CHECK(std::abs(rot.k_hat - 1.0) <= 1e-12);

  const auto disk = SpaceModel::poincare_disk();
  const auto dk = estimate_lipschitz(disk, LipschitzMap::contraction(disk.disk_point({0, 0}), 0.7),
                                     lip_spec());
  CHECK(dk.passed());
  CHECK(dk.k_hat <= 0.7 + 1e-7);

  // A mislabeled constant is caught.
  const auto wrong = estimate_lipschitz(
      e2, LipschitzMap::contraction(e2.point({0, 0}), 0.5).with_declared_k(0.3), lip_spec(1000));
  CHECK(wrong.status == AuditStatus::violated);
  CHECK(wrong.declared_k == 0.3);
  REQUIRE(wrong.witness.points.size() == 2);
  const auto& w = wrong.witness.points;
  const auto map = LipschitzMap::contraction(e2.point({0, 0}), 0.5);
  CHECK(distance(e2, apply(e2, map, w[0]), apply(e2, map, w[1])) / distance(e2, w[0], w[1]) ==
        doctest::Approx(wrong.k_hat));

  // Every pair coincides in a one-point tree.
  const auto solo = SpaceModel::metric_tree(MetricTree({"only"}, {}), "solo");
  CHECK(estimate_lipschitz(solo, LipschitzMap::identity(), lip_spec(10)).status ==
        AuditStatus::inconclusive);
}

TEST_CASE("catalogue maps respect their declared constants") {
  for (const auto& space : fixtures::all_models()) {
    CAPTURE(space.name());
    const double tol = default_tolerance(space);
    for (const auto& map : catalogue(space)) {
      CAPTURE(map.kind_name());
      auto spec = lip_spec();
      spec.tol = tol;
      const auto est = estimate_lipschitz(space, map, spec);
      CHECK(est.passed());
      CHECK(est.k_hat <= map.declared_k() + tol);
      const auto twice = LipschitzMap::compose({map, map});
      CHECK(estimate_lipschitz(space, twice, spec).k_hat <= map.declared_k() * map.declared_k() + tol);
    }
  }
  const auto star = fixtures::star3();
  const auto swap = LipschitzMap::tree_automorphism(star, {0, 2, 3, 1});
  const auto est = estimate_lipschitz(star, swap, lip_spec());
  CHECK(est.passed());
  CHECK(std::abs(est.k_hat - 1.0) <= 1e-9);
}

TEST_CASE("ball projection is idempotent") {
  for (const auto& space : fixtures::all_models()) {
    Rng rng = substream(77, 0);
    const auto proj = LipschitzMap::ball_projection(sample_point(space, rng), 0.3);
    for (std::uint64_t i = 0; i < 500; ++i) {
      Rng r = substream(78, i);
      const Point x = sample_point(space, r);
      const Point once = apply(space, proj, x);
      CHECK(distance(space, apply(space, proj, once), once) <= 1e-12);
    }
  }
}

TEST_CASE("affine spectral norm matches power iteration") {
  for (std::size_t n : {2u, 3u, 5u}) {
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng rng = substream(90 + n, i);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> a(n * n);
      for (auto& v : a) v = u(rng);
      const auto map = LipschitzMap::affine(a, std::vector<double>(n, 0.0));
      CHECK(map.declared_k() == doctest::Approx(oracle::spectral_norm(a, n)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Banach fixed point") {
  const auto e1 = SpaceModel::euclidean(1);
  const auto s = LipschitzMap::contraction(e1.point({4}), 0.5);
  const auto r = banach_fixed_point(e1, s, e1.point({0}), 1e-12, 1000);
  CHECK(r.converged);
  CHECK(std::abs(r.point.coords()[0] - 4.0) <= 1e-11);
  // 0.5 x + 2 at a few inputs.
  for (double x : {-3.0, 0.0, 1.0, 10.0})
    CHECK(apply(e1, s, e1.point({x})).coords()[0] == doctest::Approx(0.5 * x + 2.0));

  const auto id = banach_fixed_point(e1, LipschitzMap::identity(), e1.point({3}), 1e-12, 10);
  CHECK(id.converged);
  CHECK(id.iterations == 1);
  CHECK(id.final_step == 0.0);
  CHECK(id.point == e1.point({3}));

  const auto z = banach_fixed_point(e1, LipschitzMap::contraction(e1.point({0}), 0.5), e1.point({1}),
                                    1e-10, 1000);
  CHECK(z.converged);
  CHECK(z.iterations <= 35);
  CHECK(std::abs(z.point.coords()[0]) <= 1e-10);

  const auto stuck = banach_fixed_point(e1, LipschitzMap::rotation(e1.point({0}), M_PI),
                                        e1.point({1}), 1e-10, 50);
  CHECK_FALSE(stuck.converged);
  CHECK(stuck.iterations == 50);
  CHECK_THROWS_AS(banach_fixed_point(e1, s, e1.point({0}), 0.0, 10), GeometryError);
}

TEST_CASE("fixed points are map-invariant") {
  for (const auto& space : fixtures::all_models()) {
    CAPTURE(space.name());
    const double tol = 1e-10;
    for (const auto& map : catalogue(space)) {
      if (map.declared_k() >= 1.0) continue;
      Rng rng = substream(5, 0);
      const auto r = banach_fixed_point(space, map, sample_point(space, rng), tol, 100000);
      CHECK(r.converged);
      CHECK(distance(space, r.point, apply(space, map, r.point)) <= 10 * tol);
      const double bound = tol * (1 + map.declared_k()) / (1 - map.declared_k());
      CHECK(distance(space, r.point, apply(space, map, r.point)) <= bound);
    }
  }
}

TEST_CASE("known fixed points") {
  const auto e2 = SpaceModel::euclidean(2);
  const auto aff = LipschitzMap::affine({0.5, 0, 0, 0.5}, {1, 2});
  const auto kf = known_fixed_point(e2, aff, e2.point({0, 0}));
  REQUIRE(kf.has_value());
  CHECK(kf->coords()[0] == doctest::Approx(2.0));
  CHECK(kf->coords()[1] == doctest::Approx(4.0));
  CHECK_FALSE(known_fixed_point(e2, LipschitzMap::affine({1, 0, 0, 1}, {1, 0}), e2.point({0, 0})));
  const Point hint = e2.point({3, 3});
  CHECK(known_fixed_point(e2, LipschitzMap::identity(), hint) == hint);
  CHECK(known_fixed_point(e2, LipschitzMap::ball_projection(hint, 1.0), e2.point({0, 0})) == hint);
}
