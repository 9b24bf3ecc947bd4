#include "fissflow/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fissflow/errors.hpp"

namespace fissflow {

namespace {

struct Tri {
    int v[3];
    bool alive = true;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).cross(c - a);
}

// > 0 when d lies strictly inside the circumcircle of CCW triangle (a,b,c)
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
           ad2 * (bdx * cdy - cdx * bdy);
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw InvalidInputError("delaunay: need at least 3 points");

    // bounding box sets the tolerance scales and the phantom-box size
    double xmin = points[0].x, xmax = points[0].x, ymin = points[0].y, ymax = points[0].y;
    for (const Vec2& p : points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-30});
    const double eps_orient = 1e-12 * span * span;
    const double eps_incircle = 1e-12 * span * span * span * span;

    bool collinear = true;
    for (int i = 2; i < n && collinear; ++i) {
        if (std::abs(orient(points[0], points[1], points[static_cast<std::size_t>(i)])) > eps_orient)
            collinear = false;
    }
    if (collinear) throw InvalidInputError("delaunay: all points are collinear");

    // working point list with 4 phantom corners far outside the data
    std::vector<Vec2> pts(points);
    const double pad = 10.0 * span;
    const int p0 = n, p1 = n + 1, p2 = n + 2, p3 = n + 3;
    pts.push_back({xmin - pad, ymin - pad});
    pts.push_back({xmax + pad, ymin - pad});
    pts.push_back({xmax + pad, ymax + pad});
    pts.push_back({xmin - pad, ymax + pad});

    std::vector<Tri> tris;
    tris.push_back({{p0, p1, p2}, true});
    tris.push_back({{p0, p2, p3}, true});

    // incremental insertion in index order; co-circular configurations are not
    // re-triangulated (strict incircle test), which makes ties deterministic
    std::vector<int> bad;
    for (int ip = 0; ip < n; ++ip) {
        const Vec2& p = pts[static_cast<std::size_t>(ip)];
        bad.clear();
        for (int it = 0; it < static_cast<int>(tris.size()); ++it) {
            Tri& t = tris[static_cast<std::size_t>(it)];
            if (!t.alive) continue;
            if (incircle(pts[static_cast<std::size_t>(t.v[0])], pts[static_cast<std::size_t>(t.v[1])],
                         pts[static_cast<std::size_t>(t.v[2])], p) > eps_incircle) {
                bad.push_back(it);
            }
        }
        if (bad.empty()) {
            // duplicate of an existing point or numerically coincident with one
            throw InvalidInputError("delaunay: point " + std::to_string(ip) +
                                    " coincides with an existing vertex");
        }

        // cavity boundary: directed edges of bad triangles not shared by two bad ones
        std::vector<std::array<int, 2>> boundary;
        for (int it : bad) {
            const Tri& t = tris[static_cast<std::size_t>(it)];
            for (int k = 0; k < 3; ++k) {
                const int a = t.v[k], b = t.v[(k + 1) % 3];
                bool shared = false;
                for (int jt : bad) {
                    if (jt == it) continue;
                    const Tri& s = tris[static_cast<std::size_t>(jt)];
                    for (int m = 0; m < 3; ++m) {
                        if (s.v[m] == b && s.v[(m + 1) % 3] == a) { shared = true; break; }
                    }
                    if (shared) break;
                }
                if (!shared) boundary.push_back({a, b});
            }
        }
        for (int it : bad) tris[static_cast<std::size_t>(it)].alive = false;
        for (const auto& e : boundary) {
            if (std::abs(orient(pts[static_cast<std::size_t>(e[0])], pts[static_cast<std::size_t>(e[1])], p)) <= eps_orient) {
                // p collinear with a cavity edge: keep a degenerate-free mesh by
                // treating the edge as pass-through (cannot happen with phantom
                // corners present, guarded for safety)
                continue;
            }
            tris.push_back({{e[0], e[1], ip}, true});
        }
    }

    std::vector<std::array<int, 3>> result;
    for (const Tri& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;  // touches a phantom corner
        result.push_back({t.v[0], t.v[1], t.v[2]});
    }
    if (result.empty()) throw MeshError("delaunay: triangulation produced no triangles");
    return result;
}

}  // namespace fissflow
