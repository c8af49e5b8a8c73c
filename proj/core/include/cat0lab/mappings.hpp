#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "cat0lab/report.hpp"
#include "cat0lab/space.hpp"

namespace cat0lab {

class LipschitzMap;

namespace maps {

struct Identity {};

/// Tx = combine(x, anchor, factor): d(anchor, Tx) = factor * d(anchor, x).
/// The anchor is the fixed point.
struct GeodesicContraction {
  Point anchor;
  double factor;
};

/// Rotation by `angle` about `center`. Euclidean spaces rotate the coordinate
/// plane (axis_i, axis_j); in dimension 1 only angles with cos = +-1 are
/// accepted (identity or reflection about the centre). The disk rotates
/// about `center` through the Mobius chart.
struct Rotation {
  Point center;
  double angle;
  std::size_t axis_i = 0;
  std::size_t axis_j = 1;
};

/// Tree automorphism given as an image index for every node.
struct TreeAutomorphism {
  std::vector<std::size_t> node_image;
};

/// Nearest-point projection onto the closed ball B(center, radius).
struct BallProjection {
  Point center;
  double radius;
};

/// x -> A x + b on a Euclidean space; A is row-major n x n.
struct Affine {
  std::vector<double> matrix;
  std::vector<double> offset;
};

/// maps[0] is applied first.
struct Compose {
  std::vector<LipschitzMap> maps;
};

}  // namespace maps

/// A self-map descriptor with a declared Lipschitz constant. The natural
/// constant is filled in by the factory functions; `with_declared_k` lets a
/// caller state a different (possibly wrong) constant, which the audits then
/// test.
class LipschitzMap {
 public:
  using Kind = std::variant<maps::Identity, maps::GeodesicContraction, maps::Rotation,
                            maps::TreeAutomorphism, maps::BallProjection, maps::Affine,
                            maps::Compose>;

  static LipschitzMap identity();
  static LipschitzMap contraction(Point anchor, double factor);
  static LipschitzMap rotation(Point center, double angle, std::size_t axis_i = 0,
                               std::size_t axis_j = 1);
  static LipschitzMap tree_automorphism(const SpaceModel& space,
                                        std::vector<std::size_t> node_image);
  static LipschitzMap ball_projection(Point center, double radius);
  /// Declared constant is the spectral norm of A.
  static LipschitzMap affine(std::vector<double> matrix, std::vector<double> offset);
  /// Declared constant is the product of the parts' constants.
  static LipschitzMap compose(std::vector<LipschitzMap> parts);

  LipschitzMap with_declared_k(double k) const;

  const Kind& kind() const { return kind_; }
  double declared_k() const { return declared_k_; }
  std::string kind_name() const;

 private:
  LipschitzMap(Kind kind, double k) : kind_(std::move(kind)), declared_k_(k) {}

  Kind kind_;
  double declared_k_;
};

/// Throws GeometryError if the map's points or parameters do not fit `space`.
void validate_map(const SpaceModel& space, const LipschitzMap& map);

Point apply(const SpaceModel& space, const LipschitzMap& map, const Point& x);

/// [x, Tx, ..., T^n x].
std::vector<Point> iterate(const SpaceModel& space, const LipschitzMap& map, const Point& x,
                           std::size_t n);

/// T^n x.
Point apply_power(const SpaceModel& space, const LipschitzMap& map, const Point& x, std::size_t n);

struct LipschitzEstimate {
  double k_hat = 0.0;
  double declared_k = 0.0;
  std::size_t pairs = 0;  // distinct pairs evaluated
  AuditStatus status = AuditStatus::inconclusive;
  AuditSample witness;  // pair attaining k_hat

  bool passed() const { return status == AuditStatus::passed; }
};

/// sup over sampled distinct pairs of d(Tx,Ty)/d(x,y). Half of the pairs are
/// independent draws, half are close pairs (to catch local stretching).
/// Passes iff k_hat <= declared_k + tol; inconclusive if every pair coincided.
LipschitzEstimate estimate_lipschitz(const SpaceModel& space, const LipschitzMap& map,
                                     const AuditSpec& spec);

struct FixedPointResult {
  Point point;
  std::size_t iterations = 0;
  double final_step = 0.0;
  bool converged = false;
};

/// Picard iteration x_{k+1} = T x_k until d(x_k, x_{k+1}) <= tol.
FixedPointResult banach_fixed_point(const SpaceModel& space, const LipschitzMap& map,
                                    const Point& x0, double tol, std::size_t max_iter);

/// A fixed point known in closed form (anchor, centre, fixed node, ...), if
/// any. The identity returns `hint`.
std::optional<Point> known_fixed_point(const SpaceModel& space, const LipschitzMap& map,
                                       const Point& hint);

}  // namespace cat0lab
