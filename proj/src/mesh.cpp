#include "fissflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "fissflow/delaunay.hpp"
#include "fissflow/errors.hpp"
#include "fissflow/lifting.hpp"

namespace fissflow {

namespace {

constexpr double kDegenerateAreaFactor = 1e-12;       // of the bounding-box area
constexpr double kMinAngleDeg = 0.5;

std::string edge_name(int a, int b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

double min_angle_rad(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double la = (c - b).norm(), lb = (a - c).norm(), lc = (b - a).norm();
    const double area2 = std::abs((b - a).cross(c - a));
    // sin(angle at A) = area2 / (lb*lc), etc.
    double smin = 2.0;
    smin = std::min(smin, area2 / (lb * lc));
    smin = std::min(smin, area2 / (la * lc));
    smin = std::min(smin, area2 / (la * lb));
    return std::asin(std::clamp(smin, 0.0, 1.0));
}

}  // namespace

Triangulation build_triangulation(const std::vector<SamplePoint>& points,
                                  const std::optional<std::vector<std::array<int, 3>>>& connectivity) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw InvalidInputError("mesh: need at least 3 sample points");

    // pairwise distinct positions
    {
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            const Vec2& a = points[static_cast<std::size_t>(i)].position;
            const Vec2& b = points[static_cast<std::size_t>(j)].position;
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        for (int i = 0; i + 1 < n; ++i) {
            if (points[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].position ==
                points[static_cast<std::size_t>(order[static_cast<std::size_t>(i + 1)])].position) {
                throw InvalidInputError("mesh: duplicate sample point at index " +
                                        std::to_string(order[static_cast<std::size_t>(i + 1)]));
            }
        }
    }

    Triangulation t;
    t.vertices.reserve(static_cast<std::size_t>(n));
    for (const SamplePoint& p : points) t.vertices.push_back(p.position);

    if (connectivity) {
        t.triangles = *connectivity;
        for (auto& tri : t.triangles) {
            for (int v : tri) {
                if (v < 0 || v >= n)
                    throw MeshError("mesh: triangle vertex index " + std::to_string(v) + " out of range");
            }
        }
        // normalize to positive orientation
        for (std::size_t k = 0; k < t.triangles.size(); ++k) {
            if (t.signed_area(static_cast<int>(k)) < 0.0)
                std::swap(t.triangles[k][1], t.triangles[k][2]);
        }
    } else {
        t.triangles = delaunay_triangulate(t.vertices);
    }
    if (t.triangles.empty()) throw MeshError("mesh: no triangles");

    // degeneracy thresholds
    double xmin = t.vertices[0].x, xmax = xmin, ymin = t.vertices[0].y, ymax = ymin;
    for (const Vec2& p : t.vertices) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double bbox_area = std::max((xmax - xmin) * (ymax - ymin), 1e-300);
    const double min_angle = kMinAngleDeg * std::numbers::pi / 180.0;
    for (int k = 0; k < t.n_triangles(); ++k) {
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        const double area = t.signed_area(k);
        if (area <= kDegenerateAreaFactor * bbox_area)
            throw MeshError("mesh: triangle " + std::to_string(k) + " is degenerate (area " +
                            std::to_string(area) + ")");
        if (min_angle_rad(t.vertices[static_cast<std::size_t>(tri[0])], t.vertices[static_cast<std::size_t>(tri[1])],
                          t.vertices[static_cast<std::size_t>(tri[2])]) < min_angle)
            throw MeshError("mesh: triangle " + std::to_string(k) + " below the minimum-angle threshold");
    }

    // edge table; a directed edge may appear only once in a conforming oriented mesh
    std::map<std::pair<int, int>, int> edge_of;
    std::map<std::pair<int, int>, int> directed_seen;
    t.tri_edges.assign(t.triangles.size(), {-1, -1, -1});
    for (int k = 0; k < t.n_triangles(); ++k) {
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        for (int s = 0; s < 3; ++s) {
            const int a = tri[static_cast<std::size_t>(s)];
            const int b = tri[static_cast<std::size_t>((s + 1) % 3)];
            if (directed_seen.count({a, b}))
                throw MeshError("mesh: non-conforming connectivity, directed edge " + edge_name(a, b) +
                                " used twice");
            directed_seen[{a, b}] = k;

            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                Edge e;
                e.v0 = key.first;
                e.v1 = key.second;
                e.length = (t.vertices[static_cast<std::size_t>(e.v1)] - t.vertices[static_cast<std::size_t>(e.v0)]).norm();
                e.left = k;
                t.edges.push_back(e);
                edge_of[key] = t.n_edges() - 1;
                t.tri_edges[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] = t.n_edges() - 1;
            } else {
                Edge& e = t.edges[static_cast<std::size_t>(it->second)];
                if (e.right != -1)
                    throw MeshError("mesh: non-conforming connectivity, edge " + edge_name(e.v0, e.v1) +
                                    " shared by more than two triangles");
                e.right = k;
                t.tri_edges[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] = it->second;
            }
        }
    }

    // canonical owner is the lower triangle index
    for (Edge& e : t.edges) {
        if (e.right != -1 && e.right < e.left) std::swap(e.left, e.right);
        e.kind = e.right == -1 ? EdgeKind::boundary : EdgeKind::interface;
    }

    // with supplied connectivity, guard against T-junctions: no vertex may lie
    // strictly inside another triangle's edge
    if (connectivity) {
        const double tol = 1e-12 * std::sqrt(bbox_area);
        for (const Edge& e : t.edges) {
            const Vec2& a = t.vertices[static_cast<std::size_t>(e.v0)];
            const Vec2& b = t.vertices[static_cast<std::size_t>(e.v1)];
            const Vec2 d = b - a;
            for (int v = 0; v < n; ++v) {
                if (v == e.v0 || v == e.v1) continue;
                const Vec2 r = t.vertices[static_cast<std::size_t>(v)] - a;
                const double s = r.dot(d) / d.squared_norm();
                if (s <= 0.0 || s >= 1.0) continue;
                if (std::abs(r.cross(d)) / d.norm() < tol)
                    throw MeshError("mesh: non-conforming connectivity, vertex " + std::to_string(v) +
                                    " lies inside edge " + edge_name(e.v0, e.v1));
            }
        }
    }

    // outward normals (from the owner side) and boundary bookkeeping
    t.boundary_vertex.assign(static_cast<std::size_t>(n), false);
    for (int ei = 0; ei < t.n_edges(); ++ei) {
        Edge& e = t.edges[static_cast<std::size_t>(ei)];
        const Vec2& a = t.vertices[static_cast<std::size_t>(e.v0)];
        const Vec2& b = t.vertices[static_cast<std::size_t>(e.v1)];
        Vec2 nu = (b - a).perp().normalized();
        // orient outward from the owner triangle
        if (nu.dot((a + b) * 0.5 - t.centroid(e.left)) < 0.0) nu = -nu;
        e.nu = nu;
        if (e.kind == EdgeKind::interface) {
            t.interface_edges.push_back(ei);
        } else {
            e.boundary_id = static_cast<int>(t.boundary_edges.size());
            t.boundary_edges.push_back(ei);
            t.boundary_vertex[static_cast<std::size_t>(e.v0)] = true;
            t.boundary_vertex[static_cast<std::size_t>(e.v1)] = true;
        }
    }
    return t;
}

std::pair<std::vector<int>, std::vector<int>> classify_edges(const Triangulation& t) {
    return {t.interface_edges, t.boundary_edges};
}

LiftedGeometry lift_geometry(const Triangulation& t, const std::vector<double>& heights) {
    if (static_cast<int>(heights.size()) != t.n_vertices())
        throw InvalidInputError("lift_geometry: one height per vertex required");

    LiftedGeometry g;
    g.height = heights;

    auto lifted = [&](int v) {
        return Vec3{t.vertices[static_cast<std::size_t>(v)].x, t.vertices[static_cast<std::size_t>(v)].y,
                    heights[static_cast<std::size_t>(v)]};
    };

    g.area2d.resize(t.triangles.size());
    g.area3d.resize(t.triangles.size());
    g.normal.resize(t.triangles.size());
    for (int k = 0; k < t.n_triangles(); ++k) {
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        g.area2d[static_cast<std::size_t>(k)] = t.signed_area(k);
        const Vec3 a = lifted(tri[0]), b = lifted(tri[1]), c = lifted(tri[2]);
        const Vec3 cr = (b - a).cross(c - a);  // z-component = 2*area2d > 0
        g.area3d[static_cast<std::size_t>(k)] = 0.5 * cr.norm();
        g.normal[static_cast<std::size_t>(k)] = cr.normalized();
    }

    // side conormals are the element's lifting rotation applied to the 2D
    // outward normals; this is the reading under which the lift preserves
    // edge-normal fluxes exactly and conservative fields stay conservative
    g.edge_length3d.resize(t.edges.size());
    g.conormal_left.resize(t.edges.size());
    g.conormal_right.resize(t.edges.size());
    for (int ei = 0; ei < t.n_edges(); ++ei) {
        const Edge& e = t.edges[static_cast<std::size_t>(ei)];
        const Vec3 a = lifted(e.v0), b = lifted(e.v1);
        g.edge_length3d[static_cast<std::size_t>(ei)] = (b - a).norm();

        g.conormal_left[static_cast<std::size_t>(ei)] =
            lifting_matrix(g.normal[static_cast<std::size_t>(e.left)]).apply(e.nu);
        if (e.kind == EdgeKind::interface)
            g.conormal_right[static_cast<std::size_t>(ei)] =
                lifting_matrix(g.normal[static_cast<std::size_t>(e.right)]).apply(-e.nu);
    }
    return g;
}

MeshFile read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("mesh file: cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw ConfigError("mesh file: empty file " + path);
    std::istringstream hs(header);
    long n_points = 0, n_tris = -1;
    if (!(hs >> n_points)) throw ConfigError("mesh file: bad header in " + path);
    hs >> n_tris;  // optional

    MeshFile mf;
    mf.points.resize(static_cast<std::size_t>(n_points));
    for (long i = 0; i < n_points; ++i) {
        double x, y, z;
        if (!(in >> x >> y >> z))
            throw ConfigError("mesh file: expected " + std::to_string(n_points) + " 'x y zeta' lines in " + path);
        mf.points[static_cast<std::size_t>(i)] = {{x, y}, z};
    }
    if (n_tris >= 0) {
        std::vector<std::array<int, 3>> conn(static_cast<std::size_t>(n_tris));
        for (long k = 0; k < n_tris; ++k) {
            int i, j, l;
            if (!(in >> i >> j >> l))
                throw ConfigError("mesh file: expected " + std::to_string(n_tris) + " 'i j k' lines in " + path);
            conn[static_cast<std::size_t>(k)] = {i, j, l};
        }
        mf.connectivity = std::move(conn);
    }
    return mf;
}

void write_mesh_file(const std::string& path, const MeshFile& mesh) {
    std::ofstream out(path);
    if (!out) throw ConfigError("mesh file: cannot write " + path);
    out.precision(17);
    out << mesh.points.size();
    if (mesh.connectivity) out << ' ' << mesh.connectivity->size();
    out << '\n';
    for (const SamplePoint& p : mesh.points)
        out << p.position.x << ' ' << p.position.y << ' ' << p.height << '\n';
    if (mesh.connectivity) {
        for (const auto& tri : *mesh.connectivity)
            out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
}

}  // namespace fissflow
