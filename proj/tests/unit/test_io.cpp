#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cat0lab/geodesic.hpp"
#include "cat0lab/io.hpp"
#include "fixtures.hpp"

using namespace cat0lab;
using io::ConfigError;
using io::Json;

TEST_CASE("space descriptors") {
  CHECK(io::parse_space("euclidean:3").dimension() == 3);
  CHECK(io::parse_space("disk").kind() == SpaceKind::disk);
  const auto star = io::parse_space("tree:star3");
  CHECK(star.tree().node_count() == 4);
  CHECK(distance(star, star.node("a"), star.node("e")) == 2.0);
  const auto path = io::parse_space("tree:path4");
  CHECK(distance(path, path.node("n0"), path.node("n3")) == 3.0);
  for (const char* bad : {"euclidean:0", "euclidean:x", "euclidean:", "sphere", "", "tree:"})
    CHECK_THROWS_AS(io::parse_space(bad), ConfigError);
  CHECK_THROWS_AS(io::parse_space("tree:/nonexistent/tree.json"), ConfigError);
}

TEST_CASE("tree documents") {
  const Json doc = Json::parse(R"({"nodes": ["r", "s", "u"],
                                   "edges": [{"a": "r", "b": "s", "len": 2.0},
                                             {"a": "u", "b": "r", "len": 0.5}]})");
  const auto space = io::tree_from_json(doc, "mine");
  CHECK(distance(space, space.node("s"), space.node("u")) == 2.5);

  const auto path = std::filesystem::temp_directory_path() / "cat0lab_io_tree.json";
  std::ofstream(path) << doc.dump();
  const auto from_file = io::parse_space("tree:" + path.string());
  CHECK(from_file.tree().node_count() == 3);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(io::tree_from_json(Json::parse(R"({"nodes": ["a"]})"), "x"), ConfigError);
  CHECK_THROWS_AS(io::tree_from_json(Json::parse(
                      R"({"nodes": ["a", "a"], "edges": [{"a": "a", "b": "a", "len": 1}]})"),
                                     "x"),
                  ConfigError);
  CHECK_THROWS_AS(io::tree_from_json(Json::parse(
                      R"({"nodes": ["a", "b"], "edges": [{"a": "a", "b": "z", "len": 1}]})"),
                                     "x"),
                  ConfigError);
  // Well-formed documents describing invalid geometry raise geometry errors.
  CHECK_THROWS_AS(io::tree_from_json(Json::parse(
                      R"({"nodes": ["a", "b"], "edges": [{"a": "a", "b": "b", "len": -1}]})"),
                                     "x"),
                  GeometryError);
}

TEST_CASE("point round trips") {
  const auto e3 = SpaceModel::euclidean(3);
  const Point x = e3.point({0.1, -2.5, 1e-17});
  CHECK(io::point_from_json(e3, io::point_to_json(e3, x)) == x);
  CHECK(io::point_from_json(e3, Json::parse("[0.1, -2.5, 1e-17]")) == x);
  CHECK_THROWS_AS(io::point_from_json(e3, Json::parse("[1, 2]")), GeometryError);
  CHECK_THROWS_AS(io::point_from_json(e3, Json::parse(R"({"disk": [0, 0]})")), ConfigError);

  const auto disk = SpaceModel::poincare_disk();
  const Point z = disk.disk_point({0.3, -0.4});
  CHECK(io::point_from_json(disk, io::point_to_json(disk, z)) == z);
  CHECK(io::point_from_json(disk, Json::parse("[0.3, -0.4]")) == z);
  CHECK_THROWS_AS(io::point_from_json(disk, Json::parse("[1.0, 0.0]")), GeometryError);
  CHECK_THROWS_AS(io::point_from_json(disk, Json::parse("[0.1]")), ConfigError);

  const auto star = fixtures::star3();
  const Point on_node = star.node("b");
  const Point on_edge = star.on_edge(2, 0.25);
  CHECK(io::point_from_json(star, io::point_to_json(star, on_node)) == on_node);
  CHECK(io::point_from_json(star, io::point_to_json(star, on_edge)) == on_edge);
  CHECK(io::point_from_json(star, Json("b")) == on_node);
  CHECK(io::point_from_json(star, Json::parse(R"({"tree": {"edge": 2, "offset": 0.25}})")) ==
        on_edge);
  CHECK_THROWS_AS(io::point_from_json(star, Json("zz")), GeometryError);
  CHECK_THROWS_AS(io::point_from_json(star, Json::parse(R"({"tree": {"edge": 9, "offset": 0.1}})")),
                  ConfigError);
}

TEST_CASE("map documents") {
  const auto e2 = SpaceModel::euclidean(2);
  const auto c = io::map_from_json(
      e2, Json::parse(R"({"kind": "contraction", "anchor": [1, 1], "factor": 0.5})"));
  CHECK(c.declared_k() == 0.5);
  CHECK(apply(e2, c, e2.point({3, 1})) == e2.point({2, 1}));

  const auto rot = io::map_from_json(
      e2, Json::parse(R"({"kind": "isometry", "center": [0, 0], "angle": 1.5707963267948966})"));
  const Point r = apply(e2, rot, e2.point({1, 0}));
  CHECK(std::abs(r.coords()[0]) <= 1e-15);
  CHECK(r.coords()[1] == doctest::Approx(1.0));

  const auto aff = io::map_from_json(
      e2, Json::parse(R"({"kind": "affine", "matrix": [[2, 0], [0, 1]], "offset": [0, 1]})"));
  CHECK(aff.declared_k() == doctest::Approx(2.0));
  const auto comp = io::map_from_json(
      e2, Json::parse(R"({"kind": "compose", "maps": [{"kind": "identity"},
                          {"kind": "ball_projection", "center": [0, 0], "radius": 1}]})"));
  CHECK(apply(e2, comp, e2.point({3, 0})) == e2.point({1, 0}));
  const auto lied =
      io::map_from_json(e2, Json::parse(R"({"kind": "identity", "declared_k": 0.25})"));
  CHECK(lied.declared_k() == 0.25);

  const auto star = fixtures::star3();
  const auto perm = io::map_from_json(
      star, Json::parse(R"({"kind": "isometry", "permutation": ["c", "b", "a", "e"]})"));
  CHECK(apply(star, perm, star.node("a")) == star.node("b"));

  for (const char* bad : {R"({"factor": 0.5})", R"({"kind": "warp"})",
                          R"({"kind": "contraction", "anchor": [0, 0]})",
                          R"({"kind": "affine", "matrix": [[1, 0]], "offset": [0, 0]})",
                          R"([1, 2])"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(io::map_from_json(e2, Json::parse(bad)), ConfigError);
  }
  CHECK_THROWS_AS(io::map_from_json(e2, Json::parse(
                                            R"({"kind": "contraction", "anchor": [0, 0], "factor": 2})")),
                  GeometryError);
  CHECK_THROWS_AS(
      io::map_from_json(star, Json::parse(R"({"kind": "isometry", "permutation": ["a", "c", "b", "e"]})")),
      GeometryError);
  CHECK_THROWS_AS(
      io::map_from_json(e2, Json::parse(R"({"kind": "isometry", "permutation": ["a", "b"]})")),
      ConfigError);
}

TEST_CASE("number and CSV formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(0.046875) == "0.046875");
  CHECK(io::format_double(-2.0) == "-2");
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  const double awkward = 0.1 + 0.2;
  CHECK(std::stod(io::format_double(awkward)) == awkward);

  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::csv_field("a,b") == "\"a,b\"");
  CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("trace and record CSV") {
  const auto e1 = SpaceModel::euclidean(1);
  ScheduleConfig cfg;
  cfg.S_seq = {LipschitzMap::contraction(e1.point({0}), 0.5)};
  cfg.T_seq = cfg.S_seq;
  cfg.n_steps = 2;
  cfg.x0 = e1.point({1});
  cfg.x1 = e1.point({1});
  const std::string csv = io::trace_csv(e1, run_scheme(e1, cfg));
  std::istringstream lines(csv);
  std::string header, row0, row1;
  std::getline(lines, header);
  std::getline(lines, row0);
  std::getline(lines, row1);
  CHECK(header == "n,t_n,point,step_dist,theta,rho,step_bound_residual,monotone_residual");
  CHECK(row0.rfind("0,0.5,", 0) == 0);
  CHECK(row1.find(",1,0.25,") != std::string::npos);
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 5);

  BoundCheckRecord r;
  r.label = "two_map";
  r.lhs = 1.0;
  r.rhs = 1.5;
  r.residual = 0.5;
  r.inputs = {e1.point({0}), e1.point({1}), e1.point({2}), e1.point({3})};
  const std::string rc = io::records_csv(e1, {r});
  CHECK(rc.rfind("label,n,t,lhs,rhs,residual,vacuous,p,q,x,y\n", 0) == 0);
  CHECK(rc.find("two_map,0,0,1,1.5,0.5,0,") != std::string::npos);
}

TEST_CASE("report documents") {
  const auto e1 = SpaceModel::euclidean(1);
  ViolationReport rep;
  rep.check = "cat0";
  rep.space = "euclidean:1";
  rep.p = "2";
  rep.checked = 3;
  rep.worst_residual = -std::numeric_limits<double>::infinity();
  rep.witness = {{e1.point({1})}, 0.25};
  rep.tol = 1e-9;
  rep.status = AuditStatus::violated;
  rep.details["x"] = 1.0;
  const Json j = io::report_to_json(e1, rep);
  CHECK(j.at("check") == "cat0");
  CHECK(j.at("worst_residual") == "-inf");
  CHECK(j.at("passed") == false);
  CHECK(j.at("status") == "violated");
  CHECK(j.at("details").at("x") == 1.0);
  CHECK(j.at("witness").at("t") == 0.25);
}

TEST_CASE("config digests") {
  const Json a = Json::parse(R"({"space": "disk", "seed": 7, "t": [0.5]})");
  const Json b = Json::parse(R"({"t": [0.5], "seed": 7, "space": "disk"})");
  const Json c = Json::parse(R"({"space": "disk", "seed": 8, "t": [0.5]})");
  CHECK(io::config_digest(a) == io::config_digest(b));
  CHECK(io::config_digest(a) != io::config_digest(c));
  CHECK(io::config_digest(a).size() == 16);
  CHECK(io::config_digest(a).find_first_not_of("0123456789abcdef") == std::string::npos);
}
