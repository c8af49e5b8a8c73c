#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace cat0lab {

/// Raised for mismatched spaces, invalid payloads and out-of-range parameters.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SpaceKind { euclidean, disk, tree };

/// Location inside a metric tree. A point sits either on a node (`node >= 0`)
/// or strictly inside an edge, at `offset` from the edge's first endpoint.
struct TreePoint {
  std::int32_t node = -1;
  std::int32_t edge = -1;
  double offset = 0.0;

  bool on_node() const { return node >= 0; }
  friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

using EuclideanCoords = std::vector<double>;
using DiskCoord = std::complex<double>;

/// A point tagged with the identifier of the space that owns it.
struct Point {
  using Payload = std::variant<EuclideanCoords, DiskCoord, TreePoint>;

  std::uint64_t space_id = 0;
  Payload payload;

  const EuclideanCoords& coords() const { return std::get<EuclideanCoords>(payload); }
  DiskCoord disk() const { return std::get<DiskCoord>(payload); }
  const TreePoint& tree() const { return std::get<TreePoint>(payload); }

  friend bool operator==(const Point&, const Point&) = default;
};

/// Weighted finite tree. Edges are oriented a -> b; offsets along an edge are
/// measured from a. All-pairs node distances and predecessor tables are
/// precomputed at construction so geodesic queries are O(path length).
class MetricTree {
 public:
  struct Edge {
    std::size_t a;
    std::size_t b;
    double length;
  };

  /// Throws GeometryError unless the graph is a connected tree with positive
  /// edge lengths.
  MetricTree(std::vector<std::string> node_names, std::vector<Edge> edges);

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::string& node_name(std::size_t v) const { return names_.at(v); }
  std::size_t node_index(std::string_view name) const;
  const std::vector<std::size_t>& incident(std::size_t v) const { return incident_.at(v); }
  double total_length() const { return total_length_; }

  double node_distance(std::size_t u, std::size_t v) const { return dist_[u * names_.size() + v]; }

  /// Edge indices along the unique path u -> v, in travel order.
  std::vector<std::size_t> edge_path(std::size_t u, std::size_t v) const;

  /// Edge joining u and v, or -1.
  std::int64_t edge_between(std::size_t u, std::size_t v) const;

  std::size_t other_end(std::size_t e, std::size_t v) const {
    const auto& ed = edges_.at(e);
    return ed.a == v ? ed.b : ed.a;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> dist_;
  std::vector<std::int64_t> via_edge_;  // edge used to reach v from root
  double total_length_ = 0.0;
};

/// One of the three CAT(0) model spaces.
class SpaceModel {
 public:
  static SpaceModel euclidean(std::size_t dimension);
  static SpaceModel poincare_disk();
  static SpaceModel metric_tree(MetricTree tree, std::string label = "tree");

  SpaceKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t id() const { return id_; }
  const std::string& name() const { return name_; }
  const MetricTree& tree() const;

  Point point(EuclideanCoords coords) const;
  Point disk_point(DiskCoord z) const;
  Point node(std::string_view name) const;
  Point node(std::size_t index) const;
  /// Canonicalizes offset 0 / length onto the endpoint nodes.
  Point on_edge(std::size_t edge, double offset) const;

  /// Throws GeometryError if `x` does not belong to this space or its payload
  /// is invalid.
  void require(const Point& x) const;

  /// Validated copy with tree edge endpoints collapsed onto nodes.
  Point canonical(const Point& x) const;

  friend bool operator==(const SpaceModel& a, const SpaceModel& b) { return a.id_ == b.id_; }

 private:
  SpaceModel(SpaceKind kind, std::size_t dimension, std::string name,
             std::shared_ptr<const MetricTree> tree);

  SpaceKind kind_;
  std::size_t dimension_;
  std::string name_;
  std::uint64_t id_;
  std::shared_ptr<const MetricTree> tree_;
};

/// Disk points with norm at or beyond this are rejected.
inline constexpr double kDiskNormLimit = 1.0 - 1e-12;

/// Violation tolerance used by audits unless overridden: 1e-9 for flat and
/// tree models, 1e-7 for the disk.
double default_tolerance(const SpaceModel& space);

}  // namespace cat0lab
