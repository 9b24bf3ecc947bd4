#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fissflow/geometry.hpp"

namespace fissflow {

struct SamplePoint {
    Vec2 position;
    double height = 0.0;  // surface elevation at the position
};

enum class EdgeKind { interface, boundary };

// One mesh edge. The normal `nu` points outward from the owner triangle
// (`left`, always the lower triangle index); the opposite side is obtained
// by negation, so the antisymmetry of side normals holds by construction.
struct Edge {
    int v0 = -1;  // canonical endpoint order: v0 < v1
    int v1 = -1;
    double length = 0.0;
    EdgeKind kind = EdgeKind::boundary;
    int left = -1;         // owner triangle
    int right = -1;        // other triangle, -1 for boundary edges
    Vec2 nu;               // unit normal, outward from `left`
    int boundary_id = -1;  // position among boundary edge-elements, -1 otherwise
};

// Conforming 2D triangulation plus the indexing conventions used downstream:
// triangles are states 0..n_triangles-1 and boundary edge-elements continue
// the numbering as absorbing states.
class Triangulation {
public:
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
    std::vector<Edge> edges;
    std::vector<int> interface_edges;  // indices into `edges`
    std::vector<int> boundary_edges;
    std::vector<std::array<int, 3>> tri_edges;  // per triangle: edge ids, k-th is edge (v_k, v_{k+1})
    std::vector<bool> boundary_vertex;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int n_boundary_elements() const { return static_cast<int>(boundary_edges.size()); }
    // states of the extended triangulation: triangles first, then boundary elements
    int n_states() const { return n_triangles() + n_boundary_elements(); }
    int boundary_state(int boundary_id) const { return n_triangles() + boundary_id; }

    double signed_area(int tri) const {
        const auto& t = triangles[static_cast<std::size_t>(tri)];
        const Vec2& a = vertices[static_cast<std::size_t>(t[0])];
        const Vec2& b = vertices[static_cast<std::size_t>(t[1])];
        const Vec2& c = vertices[static_cast<std::size_t>(t[2])];
        return 0.5 * (b - a).cross(c - a);
    }

    Vec2 centroid(int tri) const {
        const auto& t = triangles[static_cast<std::size_t>(tri)];
        return (vertices[static_cast<std::size_t>(t[0])] + vertices[static_cast<std::size_t>(t[1])] +
                vertices[static_cast<std::size_t>(t[2])]) / 3.0;
    }

    // outward unit normal of edge `e` as seen from triangle `tri`
    Vec2 outward_normal(int e, int tri) const {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        return ed.left == tri ? ed.nu : -ed.nu;
    }

    // neighbor state across edge `e` from triangle `tri` (triangle or boundary element)
    int neighbor_state(int e, int tri) const {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        if (ed.kind == EdgeKind::boundary) return boundary_state(ed.boundary_id);
        return ed.left == tri ? ed.right : ed.left;
    }
};

// Per-element 3D geometry of the lifted surface.
struct LiftedGeometry {
    std::vector<double> height;      // per vertex
    std::vector<double> area2d;      // per triangle
    std::vector<double> area3d;      // per triangle, |K^zeta|
    std::vector<Vec3> normal;        // per triangle, upward unit normal
    std::vector<double> edge_length3d;  // per edge, sigma^zeta
    // in-plane outward unit co-normals, one per edge side
    std::vector<Vec3> conormal_left;   // side of the owner triangle
    std::vector<Vec3> conormal_right;  // opposite side (interface edges only)

    Vec3 conormal(int e, int tri, const Triangulation& t) const {
        return t.edges[static_cast<std::size_t>(e)].left == tri
                   ? conormal_left[static_cast<std::size_t>(e)]
                   : conormal_right[static_cast<std::size_t>(e)];
    }
};

// Delaunay triangulation when no connectivity is supplied; otherwise validates
// and indexes the given conforming connectivity.
Triangulation build_triangulation(const std::vector<SamplePoint>& points,
                                  const std::optional<std::vector<std::array<int, 3>>>& connectivity = std::nullopt);

// Edge partition (interface edge ids, boundary edge ids).
std::pair<std::vector<int>, std::vector<int>> classify_edges(const Triangulation& t);

LiftedGeometry lift_geometry(const Triangulation& t, const std::vector<double>& heights);

// Plain-text mesh file: "n_points [n_triangles]" header, "x y zeta" lines,
// then optional "i j k" triangles (0-based).
struct MeshFile {
    std::vector<SamplePoint> points;
    std::optional<std::vector<std::array<int, 3>>> connectivity;
};
MeshFile read_mesh_file(const std::string& path);
void write_mesh_file(const std::string& path, const MeshFile& mesh);

}  // namespace fissflow
