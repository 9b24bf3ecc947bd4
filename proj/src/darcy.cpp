#include "fissflow/darcy.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "fissflow/errors.hpp"

namespace fissflow {

namespace {

constexpr double kSolveTol = 1e-10;  // relative residual of the linear solve

// gradients of the three hat functions on a triangle
std::array<Vec2, 3> hat_gradients(const Triangulation& t, int k) {
    const auto& tri = t.triangles[static_cast<std::size_t>(k)];
    const Vec2& a = t.vertices[static_cast<std::size_t>(tri[0])];
    const Vec2& b = t.vertices[static_cast<std::size_t>(tri[1])];
    const Vec2& c = t.vertices[static_cast<std::size_t>(tri[2])];
    const double inv_det = 1.0 / (b - a).cross(c - a);
    // grad phi_i is perpendicular to the opposite edge
    return {Vec2{(c - b).perp() * inv_det},
            Vec2{(a - c).perp() * inv_det},
            Vec2{(b - a).perp() * inv_det}};
}

}  // namespace

void FluidParams::validate() const {
    if (!(a > 0.0)) throw ConfigError("fluid: flow resistance a must be positive");
    if (!(rho > 0.0)) throw ConfigError("fluid: density rho must be positive");
    if (!(g > 0.0)) throw ConfigError("fluid: gravity g must be positive");
    if (!(depth > 0.0)) throw ConfigError("fluid: flow depth D must be positive");
    if (!(gamma >= 0.0)) throw ConfigError("fluid: friction coefficient gamma must be non-negative");
}

PoissonSystem assemble_poisson(const Triangulation& t) {
    PoissonSystem sys;
    sys.interior_index.assign(static_cast<std::size_t>(t.n_vertices()), -1);
    for (int v = 0; v < t.n_vertices(); ++v) {
        if (!t.boundary_vertex[static_cast<std::size_t>(v)]) {
            sys.interior_index[static_cast<std::size_t>(v)] = static_cast<int>(sys.interior_vertices.size());
            sys.interior_vertices.push_back(v);
        }
    }
    const int ni = sys.n_interior();
    sys.stiffness.resize(ni, ni);
    if (ni == 0) return sys;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(9 * t.n_triangles()));
    for (int k = 0; k < t.n_triangles(); ++k) {
        const auto grads = hat_gradients(t, k);
        const double area = t.signed_area(k);
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        for (int i = 0; i < 3; ++i) {
            const int gi = sys.interior_index[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int gj = sys.interior_index[static_cast<std::size_t>(tri[static_cast<std::size_t>(j)])];
                if (gj < 0) continue;
                trip.emplace_back(gi, gj, area * grads[static_cast<std::size_t>(i)].dot(grads[static_cast<std::size_t>(j)]));
            }
        }
    }
    sys.stiffness.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

PressureSolution solve_pressure(const Triangulation& t, const NodalScalarField& zeta,
                                const NodalScalarField& pressure_potential, const FluidParams& params) {
    if (zeta.size() != t.n_vertices() || pressure_potential.size() != t.n_vertices())
        throw InvalidInputError("solve_pressure: nodal fields must match the vertex count");
    params.validate();

    PressureSolution sol;
    sol.p0 = NodalScalarField(t.n_vertices(), 0.0);

    const PoissonSystem sys = assemble_poisson(t);
    if (sys.n_interior() == 0) return sol;  // pure boundary mesh: p0 = 0

    // weak-form load: b_i = -sum_K |K| (rho g grad zeta + grad P) . grad phi_i
    const ElementField2 grad_zeta = gradient_p1(zeta, t);
    const ElementField2 grad_p = gradient_p1(pressure_potential, t);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.n_interior());
    for (int k = 0; k < t.n_triangles(); ++k) {
        const Vec2 forcing = grad_zeta[k] * (params.rho * params.g) + grad_p[k];
        const auto grads = hat_gradients(t, k);
        const double area = t.signed_area(k);
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        for (int i = 0; i < 3; ++i) {
            const int gi = sys.interior_index[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
            if (gi >= 0) b[gi] -= area * forcing.dot(grads[static_cast<std::size_t>(i)]);
        }
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.stiffness);
    if (solver.info() != Eigen::Success)
        throw NumericError("solve_pressure: stiffness factorization failed");
    const Eigen::VectorXd x = solver.solve(b);
    const double bn = b.norm();
    const double rel = bn > 0.0 ? (sys.stiffness * x - b).norm() / bn : 0.0;
    if (rel > kSolveTol)
        throw NumericError("solve_pressure: linear solve residual " + std::to_string(rel) +
                           " exceeds tolerance " + std::to_string(kSolveTol));

    for (int i = 0; i < sys.n_interior(); ++i)
        sol.p0[sys.interior_vertices[static_cast<std::size_t>(i)]] = x[i];
    return sol;
}

ElementField2 primary_field(const PressureSolution& p, const NodalScalarField& pressure_potential,
                            const NodalScalarField& zeta, const FluidParams& params,
                            const Triangulation& t) {
    params.validate();
    const ElementField2 grad_p0 = gradient_p1(p.p0, t);
    const ElementField2 grad_pp = gradient_p1(pressure_potential, t);
    const ElementField2 grad_zeta = gradient_p1(zeta, t);
    ElementField2 v0(t.n_triangles());
    const double inv_a = 1.0 / params.a;
    for (int k = 0; k < t.n_triangles(); ++k)
        v0[k] = -(grad_p0[k] + grad_pp[k] + grad_zeta[k] * (params.rho * params.g)) * inv_a;
    return v0;
}

}  // namespace fissflow
