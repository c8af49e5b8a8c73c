#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cat0lab/mappings.hpp"
#include "cat0lab/qt_dynamics.hpp"
#include "cat0lab/report.hpp"
#include "cat0lab/scheme.hpp"
#include "cat0lab/space.hpp"

namespace cat0lab::io {

using Json = nlohmann::json;

/// Malformed descriptors and documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "euclidean:N", "disk", "tree:star3", "tree:path4" or "tree:<path to JSON>".
/// star3 has a centre c joined to a, b, e by unit edges; path4 is the unit
/// path n0 - n1 - n2 - n3.
SpaceModel parse_space(std::string_view descriptor);

/// {"nodes": ["a", ...], "edges": [{"a": "a", "b": "c", "len": 1.0}, ...]}
SpaceModel tree_from_json(const Json& doc, std::string label);

/// {"euclidean": [..]}, {"disk": [re, im]}, {"tree": {"node": "c"}} or
/// {"tree": {"edge": i, "offset": r}}. A bare array is read in the space's
/// own coordinates (or as [re, im] in the disk).
Point point_from_json(const SpaceModel& space, const Json& doc);
Json point_to_json(const SpaceModel& space, const Point& x);

/// {"kind": "contraction", "anchor": pt, "factor": k}
/// {"kind": "identity"}
/// {"kind": "isometry", "center": pt, "angle": a, "axes": [i, j]}
/// {"kind": "isometry", "permutation": ["b", "a", ...]}   (trees)
/// {"kind": "ball_projection", "center": pt, "radius": r}
/// {"kind": "affine", "matrix": [[..], ..], "offset": [..]}
/// {"kind": "compose", "maps": [..]}
/// Any kind accepts "declared_k" to override the natural constant.
LipschitzMap map_from_json(const SpaceModel& space, const Json& doc);

Json sample_to_json(const SpaceModel& space, const AuditSample& sample);
Json report_to_json(const SpaceModel& space, const ViolationReport& report);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);
/// CSV field, quoted when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

/// n, t_n, point, step_dist, theta, rho, step_bound_residual, monotone_residual
std::string trace_csv(const SpaceModel& space, const IterationTrace& trace);
/// label, n, t, lhs, rhs, residual, vacuous, p, q, x, y
std::string records_csv(const SpaceModel& space, const std::vector<BoundCheckRecord>& records);

/// 16 hex digits of FNV-1a over the canonical dump of `config`.
std::string config_digest(const Json& config);

}  // namespace cat0lab::io
