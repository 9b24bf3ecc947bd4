#include "fissflow/fields.hpp"

#include <cmath>
#include <fstream>

#include "fissflow/errors.hpp"

namespace fissflow {

ElementField2 gradient_p1(const NodalScalarField& q, const Triangulation& t) {
    if (q.size() != t.n_vertices())
        throw InvalidInputError("gradient_p1: field has " + std::to_string(q.size()) +
                                " values for " + std::to_string(t.n_vertices()) + " vertices");
    ElementField2 g(t.n_triangles());
    for (int k = 0; k < t.n_triangles(); ++k) {
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        const Vec2& a = t.vertices[static_cast<std::size_t>(tri[0])];
        const Vec2& b = t.vertices[static_cast<std::size_t>(tri[1])];
        const Vec2& c = t.vertices[static_cast<std::size_t>(tri[2])];
        const double qa = q[tri[0]], qb = q[tri[1]], qc = q[tri[2]];
        // grad solves  grad.(b-a) = qb-qa,  grad.(c-a) = qc-qa
        const Vec2 e1 = b - a, e2 = c - a;
        const double det = e1.cross(e2);  // = 2*area > 0
        g[k] = Vec2{e2.y * (qb - qa) - e1.y * (qc - qa),
                    -e2.x * (qb - qa) + e1.x * (qc - qa)} / det;
    }
    return g;
}

Eigen::VectorXd numb(const ElementField2& v) {
    Eigen::VectorXd x(2 * v.size());
    for (int k = 0; k < v.size(); ++k) {
        x[2 * k] = v[k].x;
        x[2 * k + 1] = v[k].y;
    }
    return x;
}

ElementField2 unnumb(const Eigen::VectorXd& x) {
    if (x.size() % 2 != 0)
        throw InvalidInputError("unnumb: vector length " + std::to_string(x.size()) + " is odd");
    ElementField2 v(static_cast<int>(x.size() / 2));
    for (int k = 0; k < v.size(); ++k) v[k] = {x[2 * k], x[2 * k + 1]};
    return v;
}

std::vector<double> conservation_residual(const ElementField2& v, const Triangulation& t) {
    if (v.size() != t.n_triangles())
        throw InvalidInputError("conservation_residual: field size mismatch");
    std::vector<double> r;
    r.reserve(t.interface_edges.size());
    for (int ei : t.interface_edges) {
        const Edge& e = t.edges[static_cast<std::size_t>(ei)];
        // v_K.nu_{K|L} + v_L.nu_{L|K} with nu_{L|K} = -nu_{K|L}
        r.push_back((v[e.left] - v[e.right]).dot(e.nu));
    }
    return r;
}

double max_conservation_residual(const ElementField2& v, const Triangulation& t) {
    double m = 0.0;
    for (double r : conservation_residual(v, t)) m = std::max(m, std::abs(r));
    return m;
}

namespace {

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("csv: cannot write " + path);
    out.precision(17);
    return out;
}

}  // namespace

void write_field_csv(const std::string& path, const ElementField2& v) {
    auto out = open_csv(path);
    out << "tri_id,vx,vy\n";
    for (int k = 0; k < v.size(); ++k) out << k << ',' << v[k].x << ',' << v[k].y << '\n';
}

void write_field_csv(const std::string& path, const ElementField3& v) {
    auto out = open_csv(path);
    out << "tri_id,vx,vy,vz\n";
    for (int k = 0; k < v.size(); ++k)
        out << k << ',' << v[k].x << ',' << v[k].y << ',' << v[k].z << '\n';
}

void write_nodal_csv(const std::string& path, const NodalScalarField& q, const std::string& name) {
    auto out = open_csv(path);
    out << "vertex_id," << name << '\n';
    for (int i = 0; i < q.size(); ++i) out << i << ',' << q[i] << '\n';
}

}  // namespace fissflow
