#include "cat0lab/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace cat0lab {
namespace {

class Fnv1a {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    add_byte(0xff);
  }
  void add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) add_byte(static_cast<unsigned char>(bits >> (8 * i)));
  }
  void add(std::size_t v) { add(static_cast<double>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  void add_byte(unsigned char c) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

MetricTree::MetricTree(std::vector<std::string> node_names, std::vector<Edge> edges)
    : names_(std::move(node_names)), edges_(std::move(edges)) {
  const std::size_t n = names_.size();
  if (n == 0) throw GeometryError("metric tree needs at least one node");
  for (std::size_t v = 0; v < n; ++v) {
    if (!index_.emplace(names_[v], v).second)
      throw GeometryError("duplicate tree node id '" + names_[v] + "'");
  }
  if (edges_.size() != n - 1)
    throw GeometryError("a tree on " + std::to_string(n) + " nodes needs " +
                        std::to_string(n - 1) + " edges, got " + std::to_string(edges_.size()));
  incident_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.a >= n || ed.b >= n) throw GeometryError("tree edge references an unknown node");
    if (ed.a == ed.b) throw GeometryError("tree edge is a self-loop");
    if (!(ed.length > 0.0) || !std::isfinite(ed.length))
      throw GeometryError("tree edge lengths must be positive and finite");
    incident_[ed.a].push_back(e);
    incident_[ed.b].push_back(e);
    total_length_ += ed.length;
  }

  // One traversal per root; with n - 1 edges, connectivity implies acyclicity.
  dist_.assign(n * n, std::numeric_limits<double>::infinity());
  via_edge_.assign(n * n, -1);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < n; ++root) {
    double* d = &dist_[root * n];
    std::int64_t* via = &via_edge_[root * n];
    d[root] = 0.0;
    stack.assign(1, root);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t e : incident_[u]) {
        const std::size_t w = other_end(e, u);
        if (std::isinf(d[w])) {
          d[w] = d[u] + edges_[e].length;
          via[w] = static_cast<std::int64_t>(e);
          stack.push_back(w);
        }
      }
    }
    if (root == 0 && std::any_of(d, d + n, [](double x) { return std::isinf(x); }))
      throw GeometryError("metric tree is not connected");
  }
}

std::size_t MetricTree::node_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw GeometryError("unknown tree node '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::size_t> MetricTree::edge_path(std::size_t u, std::size_t v) const {
  const std::size_t n = names_.size();
  std::vector<std::size_t> path;
  std::size_t cur = v;
  while (cur != u) {
    const auto e = static_cast<std::size_t>(via_edge_[u * n + cur]);
    path.push_back(e);
    cur = other_end(e, cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::int64_t MetricTree::edge_between(std::size_t u, std::size_t v) const {
  for (std::size_t e : incident_.at(u))
    if (other_end(e, u) == v) return static_cast<std::int64_t>(e);
  return -1;
}

SpaceModel::SpaceModel(SpaceKind kind, std::size_t dimension, std::string name,
                       std::shared_ptr<const MetricTree> tree)
    : kind_(kind), dimension_(dimension), name_(std::move(name)), tree_(std::move(tree)) {
  Fnv1a h;
  h.add(static_cast<std::size_t>(kind_));
  h.add(dimension_);
  if (tree_) {
    for (std::size_t v = 0; v < tree_->node_count(); ++v) h.add(tree_->node_name(v));
    for (const auto& e : tree_->edges()) {
      h.add(e.a);
      h.add(e.b);
      h.add(e.length);
    }
  }
  id_ = h.value();
}

SpaceModel SpaceModel::euclidean(std::size_t dimension) {
  if (dimension < 1) throw GeometryError("Euclidean dimension must be at least 1");
  return SpaceModel(SpaceKind::euclidean, dimension, "euclidean:" + std::to_string(dimension),
                    nullptr);
}

SpaceModel SpaceModel::poincare_disk() { return SpaceModel(SpaceKind::disk, 2, "disk", nullptr); }

SpaceModel SpaceModel::metric_tree(MetricTree tree, std::string label) {
  return SpaceModel(SpaceKind::tree, 0, std::move(label),
                    std::make_shared<const MetricTree>(std::move(tree)));
}

const MetricTree& SpaceModel::tree() const {
  if (!tree_) throw GeometryError(name_ + " is not a metric tree");
  return *tree_;
}

Point SpaceModel::point(EuclideanCoords coords) const {
  if (kind_ != SpaceKind::euclidean) throw GeometryError(name_ + " has no coordinate points");
  Point p{id_, std::move(coords)};
  require(p);
  return p;
}

Point SpaceModel::disk_point(DiskCoord z) const {
  if (kind_ != SpaceKind::disk) throw GeometryError(name_ + " is not the Poincare disk");
  Point p{id_, z};
  require(p);
  return p;
}

Point SpaceModel::node(std::string_view name) const { return node(tree().node_index(name)); }

Point SpaceModel::node(std::size_t index) const {
  if (index >= tree().node_count()) throw GeometryError("tree node index out of range");
  return Point{id_, TreePoint{static_cast<std::int32_t>(index), -1, 0.0}};
}

Point SpaceModel::on_edge(std::size_t edge, double offset) const {
  const auto& t = tree();
  if (edge >= t.edge_count()) throw GeometryError("tree edge index out of range");
  const auto& ed = t.edge(edge);
  if (!(offset >= 0.0 && offset <= ed.length))
    throw GeometryError("tree offset outside [0, edge length]");
  if (offset == 0.0) return node(ed.a);
  if (offset == ed.length) return node(ed.b);
  return Point{id_, TreePoint{-1, static_cast<std::int32_t>(edge), offset}};
}

void SpaceModel::require(const Point& x) const {
  if (x.space_id != id_) throw GeometryError("point does not belong to space " + name_);
  switch (kind_) {
    case SpaceKind::euclidean: {
      const auto* c = std::get_if<EuclideanCoords>(&x.payload);
      if (!c || c->size() != dimension_)
        throw GeometryError("expected a " + std::to_string(dimension_) + "-vector");
      for (double v : *c)
        if (!std::isfinite(v)) throw GeometryError("non-finite coordinate");
      return;
    }
    case SpaceKind::disk: {
      const auto* z = std::get_if<DiskCoord>(&x.payload);
      if (!z) throw GeometryError("expected a disk coordinate");
      if (!std::isfinite(z->real()) || !std::isfinite(z->imag()) || !(std::abs(*z) < kDiskNormLimit))
        throw GeometryError("disk point must have norm < 1");
      return;
    }
    case SpaceKind::tree: {
      const auto* tp = std::get_if<TreePoint>(&x.payload);
      if (!tp) throw GeometryError("expected a tree position");
      if (tp->on_node()) {
        if (static_cast<std::size_t>(tp->node) >= tree_->node_count())
          throw GeometryError("tree node index out of range");
        return;
      }
      if (tp->edge < 0 || static_cast<std::size_t>(tp->edge) >= tree_->edge_count())
        throw GeometryError("tree edge index out of range");
      const double len = tree_->edge(static_cast<std::size_t>(tp->edge)).length;
      if (!(tp->offset >= 0.0 && tp->offset <= len))
        throw GeometryError("tree offset outside [0, edge length]");
      return;
    }
  }
}

Point SpaceModel::canonical(const Point& x) const {
  require(x);
  if (kind_ == SpaceKind::tree && !x.tree().on_node())
    return on_edge(static_cast<std::size_t>(x.tree().edge), x.tree().offset);
  return x;
}

double default_tolerance(const SpaceModel& space) {
  return space.kind() == SpaceKind::disk ? 1e-7 : 1e-9;
}

}  // namespace cat0lab
