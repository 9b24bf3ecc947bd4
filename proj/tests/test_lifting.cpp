#include <doctest.h>

#include <cmath>

#include "fissflow/errors.hpp"
#include "fissflow/lifting.hpp"
#include "fissflow/projection.hpp"
#include "fissflow/rng.hpp"
#include "support/test_helpers.hpp"

using namespace fissflow;
using namespace fissflow::testing;

namespace {

Vec3 random_upward_unit(SplitMix64& rng) {
    // z kept away from 0 so the tangent plane stays a graph
    while (true) {
        const Vec3 n{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                     0.05 + 0.95 * rng.next_double()};
        const double norm = n.norm();
        if (norm > 1e-6) return n / norm;
    }
}

}  // namespace

TEST_CASE("lifting matrix at the identity and 45 degrees") {
    const Mat32 id = lifting_matrix({0, 0, 1});
    CHECK(id(0, 0) == 1.0);
    CHECK(id(1, 1) == 1.0);
    CHECK(id(0, 1) == 0.0);
    CHECK(id(2, 0) == 0.0);
    CHECK(id(2, 1) == 0.0);

    const double s = std::sqrt(2.0) / 2.0;
    const Mat32 f = lifting_matrix({s, 0.0, s});
    CHECK(f(0, 0) == doctest::Approx(s).epsilon(1e-14));
    CHECK(f(0, 1) == doctest::Approx(0.0));
    CHECK(f(1, 1) == doctest::Approx(1.0));
    CHECK(f(2, 0) == doctest::Approx(-s).epsilon(1e-14));
    CHECK(f(2, 1) == doctest::Approx(0.0));

    CHECK_THROWS_AS(lifting_matrix({0.0, 1.0, 0.0}), MeshError);
}

TEST_CASE("lifting matrix is a tangent-plane isometry for random normals") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec3 n = random_upward_unit(rng);
        const Mat32 f = lifting_matrix(n);

        // columns orthonormal
        const Vec3 c0{f(0, 0), f(1, 0), f(2, 0)};
        const Vec3 c1{f(0, 1), f(1, 1), f(2, 1)};
        CHECK(c0.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c1.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(c0.dot(c1)) < 1e-12);

        // range orthogonal to the normal
        CHECK(std::abs(n.dot(c0)) < 1e-12);
        CHECK(std::abs(n.dot(c1)) < 1e-12);
    }
}

TEST_CASE("lift of the conservative field preserves structure") {
    const Triangulation t = random_mesh(322, 41);
    const auto zeta = [](double x, double y) {
        return 0.8 * (std::sin(2.0 * M_PI * x) * std::exp(-2.0 * M_PI * y) + y);
    };
    const LiftedGeometry geo = lift_geometry(t, heights_from(t, zeta));

    SplitMix64 rng(7);
    ElementField2 v0(t.n_triangles());
    for (int k = 0; k < v0.size(); ++k)
        v0[k] = {2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
    const ElementField2 v = project_conservative(v0, characterizing_matrix(t));
    const ElementField3 u = lift_field(v, geo);

    double max_iso = 0.0, max_tan = 0.0, max_flux = 0.0;
    for (int k = 0; k < v.size(); ++k) {
        max_iso = std::max(max_iso, std::abs(u[k].norm() - v[k].norm()));
        max_tan = std::max(max_tan, std::abs(u[k].dot(geo.normal[static_cast<std::size_t>(k)])));
    }
    for (int ei = 0; ei < t.n_edges(); ++ei) {
        const Edge& e = t.edges[static_cast<std::size_t>(ei)];
        const double f2 = v[e.left].dot(e.nu);
        const double f3 = u[e.left].dot(geo.conormal_left[static_cast<std::size_t>(ei)]);
        max_flux = std::max(max_flux, std::abs(f2 - f3));
    }
    const double scale = std::max(1.0, v.max_norm());
    CHECK(max_iso < 1e-12 * scale);
    CHECK(max_tan < 1e-12 * scale);
    CHECK(max_flux < 1e-12 * scale);

    // conservation carries over to the lifted side normals
    double max_res3 = 0.0;
    for (int ei : t.interface_edges) {
        const Edge& e = t.edges[static_cast<std::size_t>(ei)];
        const double r = u[e.left].dot(geo.conormal_left[static_cast<std::size_t>(ei)]) +
                         u[e.right].dot(geo.conormal_right[static_cast<std::size_t>(ei)]);
        max_res3 = std::max(max_res3, std::abs(r));
    }
    CHECK(max_res3 < 1e-10 * scale);

    // flat surfaces embed the field with zero vertical component
    const LiftedGeometry flat = lift_geometry(t, std::vector<double>(static_cast<std::size_t>(t.n_vertices()), 0.0));
    const ElementField3 uf = lift_field(v, flat);
    for (int k = 0; k < v.size(); ++k) {
        CHECK(uf[k].x == doctest::Approx(v[k].x).epsilon(1e-14));
        CHECK(uf[k].y == doctest::Approx(v[k].y).epsilon(1e-14));
        CHECK(uf[k].z == 0.0);
    }
}

TEST_CASE("lift on the ascending plane z = x") {
    // flow in +x on a surface rising in x climbs: positive vertical component
    const Triangulation t = single_triangle_mesh();
    const LiftedGeometry geo = lift_geometry(t, {0.0, 1.0, 0.0});
    const ElementField2 v(std::vector<Vec2>{{1.0, 0.0}});
    const Vec3 u = lift_field(v, geo)[0];
    const double s = std::sqrt(2.0) / 2.0;
    CHECK(u.x == doctest::Approx(s).epsilon(1e-14));
    CHECK(u.y == doctest::Approx(0.0));
    CHECK(u.z == doctest::Approx(s).epsilon(1e-14));
    CHECK(std::abs(u.dot(geo.normal[0])) < 1e-15);
}

TEST_CASE("dot products survive the lift") {
    SplitMix64 rng(90);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 n = random_upward_unit(rng);
        const Mat32 f = lifting_matrix(n);
        const Vec2 v1{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
        const Vec2 v2{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
        CHECK(f.apply(v1).dot(f.apply(v2)) == doctest::Approx(v1.dot(v2)).epsilon(1e-12));
    }
}

TEST_CASE("streamline chords on the reference triangle") {
    const Triangulation t = single_triangle_mesh();
    const LiftedGeometry geo = lift_geometry(t, {0.0, 0.0, 0.0});

    // flow parallel to the bottom edge
    {
        const Vec2 v{1.0, 0.0};
        const Vec3 u = lift_field(ElementField2(std::vector<Vec2>{v}), geo)[0];
        const StreamlineEntry s = mean_streamline(0, v, u, t);
        CHECK(s.alpha == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.d == doctest::Approx(0.5).epsilon(1e-12));
    }
    // diagonal flow through the hypotenuse
    {
        const Vec2 v{1.0, 1.0};
        const Vec3 u = lift_field(ElementField2(std::vector<Vec2>{v}), geo)[0];
        const StreamlineEntry s = mean_streamline(0, v, u, t);
        CHECK(s.alpha == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.d == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-12));
    }
    // no flow, no chord
    {
        const StreamlineEntry s = mean_streamline(0, {0.0, 0.0}, {0.0, 0.0, 0.0}, t);
        CHECK(s.alpha == 0.0);
        CHECK(s.d == 0.0);
    }
}

TEST_CASE("chord stays inside the element and within its diameter") {
    SplitMix64 rng(555);
    int tested = 0;
    while (tested < 10000) {
        // random triangle with corners in the unit square
        std::vector<SamplePoint> pts;
        for (int i = 0; i < 3; ++i)
            pts.push_back({{rng.next_double(), rng.next_double()}, 0.0});
        Triangulation t;
        try {
            t = build_triangulation(pts);
        } catch (const Error&) {
            continue;  // rejected degenerate draw
        }
        const Vec2 v{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
        if (v.norm() < 1e-12) continue;
        const LiftedGeometry geo = lift_geometry(t, {0.0, 0.0, 0.0});
        const Vec3 u = lift_field(ElementField2(std::vector<Vec2>{v}), geo)[0];
        const StreamlineEntry s = mean_streamline(0, v, u, t);
        ++tested;

        const auto& tri = t.triangles[0];
        const Vec2 a = t.vertices[static_cast<std::size_t>(tri[0])];
        const Vec2 b = t.vertices[static_cast<std::size_t>(tri[1])];
        const Vec2 c = t.vertices[static_cast<std::size_t>(tri[2])];
        const double diam = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        CHECK(s.alpha > 0.0);
        CHECK(s.alpha * v.norm() <= diam * (1.0 + 1e-9));

        // the chord translated to start slightly inside the entry edge must
        // keep its midpoint in the closed element; verify via barycentrics at
        // the midpoint of the maximal chord anchored at the opposite vertex
        // (chord construction: from one vertex across to the sign-distinct edge)
        const Vec2 chord = v * s.alpha;
        bool found_anchor = false;
        for (const Vec2 vert : {a, b, c}) {
            const Vec2 mid = vert + chord * 0.5;
            const Vec2 end = vert + chord;
            auto inside = [&](const Vec2& p) {
                const double d1 = (b - a).cross(p - a);
                const double d2 = (c - b).cross(p - b);
                const double d3 = (a - c).cross(p - c);
                const double tol = 1e-9 * std::abs((b - a).cross(c - a));
                return d1 >= -tol && d2 >= -tol && d3 >= -tol;
            };
            if (inside(mid) && inside(end)) {
                found_anchor = true;
                break;
            }
        }
        // the chord may also run from an edge point; accept the reversed direction
        if (!found_anchor) {
            for (const Vec2 vert : {a, b, c}) {
                const Vec2 mid = vert - chord * 0.5;
                const Vec2 end = vert - chord;
                auto inside = [&](const Vec2& p) {
                    const double d1 = (b - a).cross(p - a);
                    const double d2 = (c - b).cross(p - b);
                    const double d3 = (a - c).cross(p - c);
                    const double tol = 1e-9 * std::abs((b - a).cross(c - a));
                    return d1 >= -tol && d2 >= -tol && d3 >= -tol;
                };
                if (inside(mid) && inside(end)) {
                    found_anchor = true;
                    break;
                }
            }
        }
        CHECK(found_anchor);
    }
}

TEST_CASE("mean streamline length is invariant under rotations about z") {
    SplitMix64 rng(321);
    for (int trial = 0; trial < 200; ++trial) {
        const double angle = 2.0 * M_PI * rng.next_double();
        const double ca = std::cos(angle), sa = std::sin(angle);
        auto rot = [&](const Vec2& p) { return Vec2{ca * p.x - sa * p.y, sa * p.x + ca * p.y}; };

        std::vector<SamplePoint> pts, rpts;
        for (int i = 0; i < 3; ++i) {
            const Vec2 p{rng.next_double(), rng.next_double()};
            const double h = rng.next_double();
            pts.push_back({p, h});
            rpts.push_back({rot(p), h});
        }
        Triangulation t, rt;
        try {
            t = build_triangulation(pts);
            rt = build_triangulation(rpts);
        } catch (const Error&) {
            continue;
        }
        const Vec2 v{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
        if (v.norm() < 1e-9) continue;

        std::vector<double> h{pts[0].height, pts[1].height, pts[2].height};
        // vertex order may differ after rotation; map heights by position
        std::vector<double> rh(3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if ((rt.vertices[static_cast<std::size_t>(i)] - rot(pts[static_cast<std::size_t>(j)].position)).norm() < 1e-12)
                    rh[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(j)].height;
            }
        }
        const LiftedGeometry geo = lift_geometry(t, h);
        const LiftedGeometry rgeo = lift_geometry(rt, rh);
        const Vec2 rv = rot(v);

        const Vec3 u = lift_field(ElementField2(std::vector<Vec2>{v}), geo)[0];
        const Vec3 ru = lift_field(ElementField2(std::vector<Vec2>{rv}), rgeo)[0];
        const StreamlineEntry s = mean_streamline(0, v, u, t);
        const StreamlineEntry rs = mean_streamline(0, rv, ru, rt);
        CHECK(rs.d == doctest::Approx(s.d).epsilon(1e-9));
    }
}
