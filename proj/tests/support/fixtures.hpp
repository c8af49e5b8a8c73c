#pragma once

#include <vector>

#include "cat0lab/space.hpp"

namespace fixtures {

using cat0lab::MetricTree;
using cat0lab::SpaceModel;

/// Centre c joined to leaves a, b, e by unit edges (edges 0, 1, 2 run c -> leaf).
inline SpaceModel star3() {
  return SpaceModel::metric_tree(
      MetricTree({"c", "a", "b", "e"}, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}), "star3");
}

/// n0 - n1 - n2 - n3 with unit edges.
inline SpaceModel path4() {
  return SpaceModel::metric_tree(
      MetricTree({"n0", "n1", "n2", "n3"}, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}}), "path4");
}

/// An irregular tree with mixed edge lengths and orientations.
inline SpaceModel lopsided() {
  return SpaceModel::metric_tree(MetricTree({"r", "u", "v", "w", "x", "y"},
                                            {{0, 1, 0.7},
                                             {2, 0, 1.3},
                                             {1, 3, 0.4},
                                             {4, 1, 2.1},
                                             {2, 5, 0.25}}),
                                 "lopsided");
}

/// The four models used by the property tests.
inline std::vector<SpaceModel> all_models() {
  return {SpaceModel::euclidean(2), SpaceModel::euclidean(5), SpaceModel::poincare_disk(), star3(),
          lopsided()};
}

}  // namespace fixtures
