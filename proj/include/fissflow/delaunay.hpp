#pragma once

#include <array>
#include <vector>

#include "fissflow/geometry.hpp"

namespace fissflow {

// Incremental Delaunay triangulation of the convex hull of `points`.
// Deterministic: points are inserted in index order and co-circular ties keep
// the earlier configuration. Triangles come out counter-clockwise.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points);

}  // namespace fissflow
