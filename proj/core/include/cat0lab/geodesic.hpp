#pragma once

#include <cstddef>
#include <cstdint>

#include "cat0lab/report.hpp"
#include "cat0lab/space.hpp"

namespace cat0lab {

/// Geodesic distance. Throws GeometryError on mismatched spaces or invalid
/// payloads.
double distance(const SpaceModel& space, const Point& x, const Point& y);

/// Geodesic blend t x (+) (1 - t) y: the point z on [x, y] with
/// d(z, x) = (1 - t) d(x, y) and d(z, y) = t d(x, y).
/// combine(x, y, 1) == x and combine(x, y, 0) == y exactly.
Point combine(const SpaceModel& space, const Point& x, const Point& y, double t);

Point midpoint(const SpaceModel& space, const Point& x, const Point& y);

/// True iff the payload matches the space and satisfies its invariants.
/// A tree point with offset equal to the edge length is valid (it is the
/// endpoint node).
bool validate_point(const SpaceModel& space, const Point& x);

/// Samples triples and reports the worst of the symmetry, nonnegativity,
/// identity and triangle residuals; per-axiom minima are in `details`.
ViolationReport audit_metric_axioms(const SpaceModel& space, std::size_t sample_count,
                                    std::uint64_t seed);

}  // namespace cat0lab
