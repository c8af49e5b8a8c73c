#include "cat0lab/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cat0lab {

ConvexityOrder::ConvexityOrder(double p) : p_(p) {
  if (!(p >= 1.0)) throw GeometryError("convexity order p must be >= 1");
  if (std::isinf(p)) {
    p_ = 0.0;
    infinite_ = true;
  }
}

double ConvexityOrder::value() const {
  if (infinite_) throw GeometryError("p = inf has no finite value");
  return p_;
}

std::string ConvexityOrder::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << p_;
  return os.str();
}

double power_mean2(double a, double b, ConvexityOrder p) {
  if (p.is_infinite()) return std::max(a, b);
  const double q = p.value();
  if (q == 1.0) return 0.5 * (a + b);
  if (q == 2.0) return std::sqrt(0.5 * (a * a + b * b));
  return std::pow(0.5 * (std::pow(a, q) + std::pow(b, q)), 1.0 / q);
}

void AuditSpec::validate() const {
  if (sample_count == 0) throw GeometryError("sample_count must be >= 1");
  if (!(tol >= 0.0)) throw GeometryError("tolerance must be >= 0");
}

std::string to_string(AuditStatus status) {
  switch (status) {
    case AuditStatus::passed:
      return "passed";
    case AuditStatus::violated:
      return "violated";
    case AuditStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void ViolationReport::observe(double residual, const AuditSample& sample) {
  ++checked;
  // NaN residuals are violations, not silently skipped.
  if (std::isnan(residual)) residual = -std::numeric_limits<double>::infinity();
  if (residual < worst_residual || witness.points.empty()) {
    worst_residual = residual;
    witness = sample;
  }
}

void ViolationReport::finish() {
  status = worst_residual >= -tol ? AuditStatus::passed : AuditStatus::violated;
}

}  // namespace cat0lab
