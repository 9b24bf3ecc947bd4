#include "fissflow/lifting.hpp"

#include <cmath>

#include "fissflow/errors.hpp"

namespace fissflow {

Mat32 lifting_matrix(const Vec3& n) {
    if (!(n.z > 0.0))
        throw MeshError("lifting_matrix: facet normal must point upward (n.z > 0)");
    Mat32 f;
    const double s = 1.0 / (1.0 + n.z);
    f(0, 0) = 1.0 - n.x * n.x * s;
    f(0, 1) = -n.x * n.y * s;
    f(1, 0) = -n.x * n.y * s;
    f(1, 1) = 1.0 - n.y * n.y * s;
    f(2, 0) = -n.x;
    f(2, 1) = -n.y;
    return f;
}

ElementField3 lift_field(const ElementField2& v, const LiftedGeometry& geo) {
    if (v.size() != static_cast<int>(geo.normal.size()))
        throw InvalidInputError("lift_field: field size does not match the geometry");
    ElementField3 u(v.size());
    for (int k = 0; k < v.size(); ++k)
        u[k] = lifting_matrix(geo.normal[static_cast<std::size_t>(k)]).apply(v[k]);
    return u;
}

StreamlineEntry mean_streamline(int tri, const Vec2& v_K, const Vec3& u_K, const Triangulation& t) {
    const double vnorm = v_K.norm();
    if (vnorm == 0.0) return {0.0, 0.0};  // element hosts no flow

    const auto& tv = t.triangles[static_cast<std::size_t>(tri)];
    // CCW edge vectors and their outward normals
    Vec2 edge_vec[3];
    double flux[3];
    for (int s = 0; s < 3; ++s) {
        const Vec2& a = t.vertices[static_cast<std::size_t>(tv[static_cast<std::size_t>(s)])];
        const Vec2& b = t.vertices[static_cast<std::size_t>(tv[static_cast<std::size_t>((s + 1) % 3)])];
        edge_vec[s] = b - a;
        // for a CCW triangle the outward normal of edge a->b is the clockwise perp
        const Vec2 nu = Vec2{edge_vec[s].y, -edge_vec[s].x}.normalized();
        flux[s] = v_K.dot(nu);
    }

    const double unorm = u_K.norm();
    const double ftol = 1e-12 * vnorm;

    // an edge parallel to the flow carries the longest chord itself
    int imin = 0;
    for (int s = 1; s < 3; ++s)
        if (std::abs(flux[s]) < std::abs(flux[imin])) imin = s;
    if (std::abs(flux[imin]) <= ftol) {
        // tie policy: keep the longer edge (cannot occur on nondegenerate triangles)
        for (int s = 0; s < 3; ++s) {
            if (s != imin && std::abs(flux[s]) <= ftol &&
                edge_vec[s].norm() > edge_vec[imin].norm())
                imin = s;
        }
        const double alpha = edge_vec[imin].norm() / vnorm;
        return {alpha, 0.5 * alpha * unorm};
    }

    // the entry/exit edge is the one whose flux sign differs from the other two
    int first = -1;
    for (int s = 0; s < 3; ++s) {
        const int o1 = (s + 1) % 3, o2 = (s + 2) % 3;
        if ((flux[s] > 0.0) != (flux[o1] > 0.0) && (flux[s] > 0.0) != (flux[o2] > 0.0)) {
            first = s;
            break;
        }
    }
    if (first < 0)
        throw NumericError("mean_streamline: no sign-distinct edge found on element " + std::to_string(tri));

    const double sign = flux[first] > 0.0 ? 1.0 : -1.0;
    const Vec2 e1 = edge_vec[first];
    const Vec2 e3 = edge_vec[(first + 2) % 3];
    // solve e3 + beta e1 - sign * alpha v = 0 for (alpha, beta)
    const double det = e1.cross(v_K) * sign;
    const double alpha = e1.cross(e3) / det;
    const double beta = (sign * v_K.cross(e3)) / det;
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw NumericError("mean_streamline: chord coefficients not positive on element " +
                           std::to_string(tri));
    return {alpha, 0.5 * alpha * unorm};
}

StreamlineData compute_streamlines(const ElementField2& v, const ElementField3& u,
                                   const Triangulation& t) {
    if (v.size() != t.n_triangles() || u.size() != t.n_triangles())
        throw InvalidInputError("compute_streamlines: field size mismatch");
    StreamlineData s;
    s.alpha.resize(static_cast<std::size_t>(t.n_triangles()));
    s.d.resize(static_cast<std::size_t>(t.n_triangles()));
    for (int k = 0; k < t.n_triangles(); ++k) {
        const StreamlineEntry e = mean_streamline(k, v[k], u[k], t);
        s.alpha[static_cast<std::size_t>(k)] = e.alpha;
        s.d[static_cast<std::size_t>(k)] = e.d;
    }
    return s;
}

}  // namespace fissflow
