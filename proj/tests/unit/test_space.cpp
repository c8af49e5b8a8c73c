#include <doctest.h>

#include "cat0lab/geodesic.hpp"
#include "cat0lab/space.hpp"
#include "fixtures.hpp"

using namespace cat0lab;

TEST_CASE("metric tree construction rejects malformed graphs") {
  CHECK_THROWS_AS(MetricTree({}, {}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "b"}, {}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "b"}, {{0, 1, 0.0}}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "b"}, {{0, 1, -1.0}}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "b"}, {{0, 0, 1.0}}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "a"}, {{0, 1, 1.0}}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "b", "c"}, {{0, 1, 1.0}, {1, 0, 1.0}}), GeometryError);
  CHECK_THROWS_AS(MetricTree({"a", "b"}, {{0, 5, 1.0}}), GeometryError);
  CHECK_NOTHROW(MetricTree({"solo"}, {}));
}

TEST_CASE("metric tree tables") {
  const auto space = fixtures::path4();
  const auto& tree = space.tree();
  CHECK(tree.node_count() == 4);
  CHECK(tree.total_length() == doctest::Approx(3.0));
  CHECK(tree.node_distance(0, 3) == 3.0);
  CHECK(tree.node_distance(2, 1) == 1.0);
  CHECK(tree.edge_path(0, 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(tree.edge_path(3, 1) == std::vector<std::size_t>{2, 1});
  CHECK(tree.edge_between(1, 2) == 1);
  CHECK(tree.edge_between(0, 2) == -1);
  CHECK(tree.node_index("n2") == 2);
  CHECK_THROWS_AS(tree.node_index("zz"), GeometryError);
}

TEST_CASE("space identity and point ownership") {
  const auto e2 = SpaceModel::euclidean(2);
  const auto e3 = SpaceModel::euclidean(3);
  CHECK(e2 == SpaceModel::euclidean(2));
  CHECK_FALSE(e2 == e3);
  CHECK(e2.name() == "euclidean:2");
  CHECK(SpaceModel::poincare_disk().name() == "disk");
  CHECK_THROWS_AS(SpaceModel::euclidean(0), GeometryError);

  const Point x = e2.point({1.0, 2.0});
  CHECK_THROWS_AS(e3.require(x), GeometryError);
  CHECK_THROWS_AS(distance(e3, x, x), GeometryError);
  CHECK_THROWS_AS(e2.point({1.0}), GeometryError);
  CHECK_THROWS_AS(e2.point({1.0, std::nan("")}), GeometryError);
  CHECK_THROWS_AS(e2.disk_point({0.0, 0.0}), GeometryError);
}

TEST_CASE("validate_point") {
  const auto disk = SpaceModel::poincare_disk();
  CHECK(validate_point(disk, disk.disk_point({0.999, 0.0})));
  CHECK_FALSE(validate_point(disk, Point{disk.id(), DiskCoord{1.0, 0.0}}));
  CHECK_FALSE(validate_point(disk, Point{disk.id(), DiskCoord{0.0, -1.5}}));
  CHECK_THROWS_AS(disk.disk_point({1.0, 0.0}), GeometryError);
  CHECK_FALSE(validate_point(disk, Point{disk.id(), DiskCoord{1.0 - 1e-13, 0.0}}));

  const auto star = fixtures::star3();
  CHECK(validate_point(star, Point{star.id(), TreePoint{-1, 0, 1.0}}));
  CHECK(validate_point(star, Point{star.id(), TreePoint{-1, 0, 0.0}}));
  CHECK_FALSE(validate_point(star, Point{star.id(), TreePoint{-1, 0, 1.5}}));
  CHECK_FALSE(validate_point(star, Point{star.id(), TreePoint{-1, 7, 0.5}}));
  CHECK_FALSE(validate_point(star, Point{star.id(), TreePoint{9, -1, 0.0}}));
  CHECK_FALSE(validate_point(star, SpaceModel::euclidean(1).point({0.0})));
}

TEST_CASE("tree edge endpoints are canonicalized onto nodes") {
  const auto star = fixtures::star3();
  CHECK(star.on_edge(0, 1.0) == star.node("a"));
  CHECK(star.on_edge(0, 0.0) == star.node("c"));
  const Point raw{star.id(), TreePoint{-1, 1, 1.0}};
  CHECK(star.canonical(raw) == star.node("b"));
  CHECK(distance(star, raw, star.node("b")) == 0.0);
  CHECK_THROWS_AS(star.on_edge(0, 1.01), GeometryError);
  CHECK_THROWS_AS(star.on_edge(3, 0.5), GeometryError);
}

TEST_CASE("default tolerances") {
  CHECK(default_tolerance(SpaceModel::euclidean(3)) == 1e-9);
  CHECK(default_tolerance(fixtures::star3()) == 1e-9);
  CHECK(default_tolerance(SpaceModel::poincare_disk()) == 1e-7);
}
