#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "cat0lab/space.hpp"

namespace cat0lab {

/// Convexity order p in [1, inf]. Infinity is a distinguished value so the
/// power mean never has to be evaluated with a huge exponent.
class ConvexityOrder {
 public:
  constexpr ConvexityOrder() = default;
  explicit ConvexityOrder(double p);
  static constexpr ConvexityOrder infinity() { return ConvexityOrder(Inf{}); }

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws GeometryError on infinity.
  double value() const;
  std::string to_string() const;

  friend bool operator==(const ConvexityOrder&, const ConvexityOrder&) = default;

 private:
  struct Inf {};
  constexpr explicit ConvexityOrder(Inf) : p_(0.0), infinite_(true) {}

  double p_ = 2.0;
  bool infinite_ = false;
};

/// (1/2)^{1/p} (a^p + b^p)^{1/p}, or max(a, b) for p = inf.
double power_mean2(double a, double b, ConvexityOrder p);

struct AuditSpec {
  ConvexityOrder p{};
  std::size_t sample_count = 10000;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  bool strict = false;

  /// Throws GeometryError when sample_count == 0 or tol < 0.
  void validate() const;
};

/// A sampled configuration: the points of the tuple plus an optional blend
/// weight (used by the checks that sample t).
struct AuditSample {
  std::vector<Point> points;
  double t = 0.0;
};

enum class AuditStatus { passed, violated, inconclusive };

std::string to_string(AuditStatus status);

struct ViolationReport {
  std::string check;
  std::string space;
  std::string p;
  std::size_t checked = 0;
  double worst_residual = std::numeric_limits<double>::infinity();
  AuditSample witness;
  double tol = 0.0;
  AuditStatus status = AuditStatus::passed;
  std::string note;
  /// Secondary residuals and counters specific to a check.
  std::map<std::string, double> details;

  bool passed() const { return status == AuditStatus::passed; }

  /// Folds one evaluated sample into the running minimum.
  void observe(double residual, const AuditSample& sample);
  /// Sets the status from worst_residual and tol.
  void finish();
};

}  // namespace cat0lab
