#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cat0lab/space.hpp"

namespace cat0lab {

using Rng = std::mt19937_64;

/// Independent generator for sample `index` of a stream seeded by `seed`.
/// Lets audits evaluate identical tuples for different checks and split a
/// stream across workers without changing results.
Rng substream(std::uint64_t seed, std::uint64_t index);

/// Sampling distributions:
///  - Euclidean: uniform in the box [-1, 1]^n
///  - disk: uniform (by area) in the sub-disk of radius 0.9
///  - tree: uniform over edges weighted by length (the node itself for a
///    single-node tree)
Point sample_point(const SpaceModel& space, Rng& rng);

/// A point within distance `radius` of `center`.
Point sample_near(const SpaceModel& space, const Point& center, double radius, Rng& rng);

/// A point at the same distance from `center` as `x`, on the far side, so
/// that `center` is the midpoint of [x, antipode]. Trees pick a random branch
/// when several continue the geodesic; the walk stops early at a leaf.
Point antipode(const SpaceModel& space, const Point& center, const Point& x, Rng& rng);

/// Small moves of size about `step` from `x`, used for local refinement.
/// Euclidean: +-step along each axis. Disk: +-step (scaled by the conformal
/// factor) along re/im. Tree: up to `step` in every direction available,
/// stopping at nodes.
std::vector<Point> local_moves(const SpaceModel& space, const Point& x, double step);

}  // namespace cat0lab
