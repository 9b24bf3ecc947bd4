#pragma once

#include <vector>

#include "fissflow/fields.hpp"
#include "fissflow/mesh.hpp"

namespace fissflow {

// Rotation-derived 3x2 map taking in-plane 2D vectors into the tangent plane
// of a facet with upward unit normal n. Columns are orthonormal and the range
// is orthogonal to n, so norms and edge-normal fluxes are preserved.
Mat32 lifting_matrix(const Vec3& n);

// Tangential 3D field u with u_K = F_K v_K per element.
ElementField3 lift_field(const ElementField2& v, const LiftedGeometry& geo);

// Per-element chord data for the (parallel) streamlines of the field:
// alpha scales v_K to the longest chord, d is the mean streamline length.
struct StreamlineEntry {
    double alpha = 0.0;
    double d = 0.0;
};

struct StreamlineData {
    std::vector<double> alpha;
    std::vector<double> d;
};

StreamlineEntry mean_streamline(int tri, const Vec2& v_K, const Vec3& u_K, const Triangulation& t);

StreamlineData compute_streamlines(const ElementField2& v, const ElementField3& u,
                                   const Triangulation& t);

}  // namespace fissflow
