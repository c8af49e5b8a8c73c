#include "cat0lab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace cat0lab::io {
namespace {

SpaceModel star3() {
  return SpaceModel::metric_tree(
      MetricTree({"c", "a", "b", "e"}, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}), "tree:star3");
}

SpaceModel path4() {
  return SpaceModel::metric_tree(
      MetricTree({"n0", "n1", "n2", "n3"}, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}}), "tree:path4");
}

std::size_t parse_count(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::size_t node_ref(const SpaceModel& space, const Json& j) {
  const MetricTree& tree = space.tree();
  if (j.is_string()) return tree.node_index(j.get<std::string>());
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= tree.node_count())
      throw ConfigError("node index out of range");
    return static_cast<std::size_t>(v);
  }
  throw ConfigError("tree nodes are named by string or index");
}

std::vector<double> number_list(const Json& j, std::string_view what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double number(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number())
    throw ConfigError(std::string("missing numeric field '") + key + "'");
  return doc.at(key).get<double>();
}

template <typename F>
auto rethrow_json(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

SpaceModel tree_from_json(const Json& doc, std::string label) {
  return rethrow_json([&] {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
      throw ConfigError("tree document needs 'nodes' and 'edges'");
    std::vector<std::string> names;
    for (const auto& n : doc.at("nodes")) names.push_back(n.get<std::string>());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (!index.emplace(names[i], i).second) throw ConfigError("duplicate node '" + names[i] + "'");
    std::vector<MetricTree::Edge> edges;
    for (const auto& e : doc.at("edges")) {
      const auto a = index.find(e.at("a").get<std::string>());
      const auto b = index.find(e.at("b").get<std::string>());
      if (a == index.end() || b == index.end()) throw ConfigError("edge names an unknown node");
      edges.push_back({a->second, b->second, e.at("len").get<double>()});
    }
    return SpaceModel::metric_tree(MetricTree(std::move(names), std::move(edges)), std::move(label));
  });
}

SpaceModel parse_space(std::string_view d) {
  if (d == "disk") return SpaceModel::poincare_disk();
  if (d.rfind("euclidean:", 0) == 0) {
    const std::size_t n = parse_count(d.substr(10), "dimension");
    if (n == 0) throw ConfigError("euclidean dimension must be >= 1");
    return SpaceModel::euclidean(n);
  }
  if (d == "tree:star3") return star3();
  if (d == "tree:path4") return path4();
  if (d.rfind("tree:", 0) == 0) {
    const std::string path(d.substr(5));
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tree file '" + path + "'");
    Json doc;
    try {
      in >> doc;
    } catch (const Json::exception& e) {
      throw ConfigError("tree file '" + path + "': " + e.what());
    }
    return tree_from_json(doc, std::string(d));
  }
  throw ConfigError("unknown space '" + std::string(d) +
                    "' (expected euclidean:N, disk, tree:star3, tree:path4 or tree:<file>)");
}

Point point_from_json(const SpaceModel& space, const Json& doc) {
  return rethrow_json([&]() -> Point {
    Point p;
    switch (space.kind()) {
      case SpaceKind::euclidean: {
        const Json& c = doc.is_object() ? doc.at("euclidean") : doc;
        p = space.point(number_list(c, "euclidean coordinates"));
        break;
      }
      case SpaceKind::disk: {
        const Json& c = doc.is_object() ? doc.at("disk") : doc;
        const auto v = number_list(c, "disk coordinate");
        if (v.size() != 2) throw ConfigError("disk points are [re, im]");
        p = space.disk_point({v[0], v[1]});
        break;
      }
      case SpaceKind::tree: {
        const Json& c = doc.is_object() && doc.contains("tree") ? doc.at("tree") : doc;
        if (c.is_object() && c.contains("node")) {
          p = space.node(node_ref(space, c.at("node")));
        } else if (c.is_object() && c.contains("edge")) {
          const auto e = c.at("edge").get<std::int64_t>();
          if (e < 0 || static_cast<std::size_t>(e) >= space.tree().edge_count())
            throw ConfigError("edge index out of range");
          p = space.on_edge(static_cast<std::size_t>(e), number(c, "offset"));
        } else {
          p = space.node(node_ref(space, c));
        }
        break;
      }
    }
    space.require(p);
    return p;
  });
}

Json point_to_json(const SpaceModel& space, const Point& x) {
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return Json{{"euclidean", x.coords()}};
    case SpaceKind::disk:
      return Json{{"disk", {x.disk().real(), x.disk().imag()}}};
    case SpaceKind::tree: {
      const TreePoint& t = x.tree();
      if (t.on_node()) return Json{{"tree", {{"node", space.tree().node_name(t.node)}}}};
      return Json{{"tree", {{"edge", t.edge}, {"offset", t.offset}}}};
    }
  }
  return Json();
}

LipschitzMap map_from_json(const SpaceModel& space, const Json& doc) {
  return rethrow_json([&]() -> LipschitzMap {
    if (!doc.is_object() || !doc.contains("kind")) throw ConfigError("map needs a 'kind'");
    const std::string kind = doc.at("kind").get<std::string>();
    LipschitzMap m = LipschitzMap::identity();
    if (kind == "identity") {
    } else if (kind == "contraction") {
      m = LipschitzMap::contraction(point_from_json(space, doc.at("anchor")), number(doc, "factor"));
    } else if (kind == "isometry") {
      if (doc.contains("permutation")) {
        if (space.kind() != SpaceKind::tree)
          throw ConfigError("permutation isometries act on trees");
        std::vector<std::size_t> image;
        for (const auto& v : doc.at("permutation")) image.push_back(node_ref(space, v));
        m = LipschitzMap::tree_automorphism(space, std::move(image));
      } else {
        std::size_t i = 0, j = 1;
        if (doc.contains("axes")) {
          const auto axes = doc.at("axes").get<std::vector<std::size_t>>();
          if (axes.size() != 2) throw ConfigError("axes must be a pair");
          i = axes[0];
          j = axes[1];
        }
        m = LipschitzMap::rotation(point_from_json(space, doc.at("center")), number(doc, "angle"), i, j);
      }
    } else if (kind == "ball_projection") {
      m = LipschitzMap::ball_projection(point_from_json(space, doc.at("center")), number(doc, "radius"));
    } else if (kind == "affine") {
      std::vector<double> flat;
      const Json& rows = doc.at("matrix");
      if (!rows.is_array()) throw ConfigError("affine matrix must be a list of rows");
      for (const auto& row : rows) {
        const auto r = number_list(row, "matrix row");
        if (r.size() != rows.size()) throw ConfigError("affine matrix must be square");
        flat.insert(flat.end(), r.begin(), r.end());
      }
      m = LipschitzMap::affine(std::move(flat), number_list(doc.at("offset"), "affine offset"));
    } else if (kind == "compose") {
      std::vector<LipschitzMap> parts;
      for (const auto& part : doc.at("maps")) parts.push_back(map_from_json(space, part));
      m = LipschitzMap::compose(std::move(parts));
    } else {
      throw ConfigError("unknown map kind '" + kind + "'");
    }
    if (doc.contains("declared_k")) m = m.with_declared_k(number(doc, "declared_k"));
    validate_map(space, m);
    return m;
  });
}

Json sample_to_json(const SpaceModel& space, const AuditSample& sample) {
  Json pts = Json::array();
  for (const auto& p : sample.points) pts.push_back(point_to_json(space, p));
  return Json{{"points", pts}, {"t", sample.t}};
}

Json report_to_json(const SpaceModel& space, const ViolationReport& r) {
  Json details = Json::object();
  for (const auto& [k, v] : r.details) details[k] = std::isfinite(v) ? Json(v) : Json(format_double(v));
  Json out{{"check", r.check},
           {"space", r.space},
           {"p", r.p},
           {"samples", r.checked},
           {"worst_residual", std::isfinite(r.worst_residual) ? Json(r.worst_residual)
                                                              : Json(format_double(r.worst_residual))},
           {"tol", r.tol},
           {"passed", r.passed()},
           {"status", to_string(r.status)},
           {"witness", r.witness.points.empty() ? Json(nullptr) : sample_to_json(space, r.witness)},
           {"details", details}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string trace_csv(const SpaceModel& space, const IterationTrace& trace) {
  std::ostringstream os;
  os << "n,t_n,point,step_dist,theta,rho,step_bound_residual,monotone_residual\n";
  for (const auto& s : trace.steps) {
    os << s.n << ',' << format_double(s.t) << ',' << csv_field(point_to_json(space, s.x).dump())
       << ',' << optional_field(s.step_dist) << ',' << optional_field(s.theta) << ','
       << optional_field(s.rho) << ',' << optional_field(s.step_bound_residual) << ','
       << optional_field(s.monotone_residual) << '\n';
  }
  return os.str();
}

std::string records_csv(const SpaceModel& space, const std::vector<BoundCheckRecord>& records) {
  std::ostringstream os;
  os << "label,n,t,lhs,rhs,residual,vacuous,p,q,x,y\n";
  for (const auto& r : records) {
    os << r.label << ',' << r.n << ',' << format_double(r.t) << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ',' << format_double(r.residual) << ',' << (r.vacuous ? 1 : 0);
    for (std::size_t i = 0; i < 4; ++i)
      os << ',' << (i < r.inputs.size() ? csv_field(point_to_json(space, r.inputs[i]).dump()) : "");
    os << '\n';
  }
  return os.str();
}

std::string config_digest(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, h, 16);
  std::string hex(buf, res.ptr);
  return std::string(16 - hex.size(), '0') + hex;
}

}  // namespace cat0lab::io
