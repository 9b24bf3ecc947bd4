#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "fissflow/fields.hpp"
#include "fissflow/mesh.hpp"

namespace fissflow {

struct FluidParams {
    double a = 1.0;      // flow resistance, Pa*s/m^2
    double rho = 1.0;    // fluid density, kg/m^3
    double g = 9.81;     // gravitational acceleration, m/s^2
    double depth = 1.0;  // flow depth D, m
    double gamma = 0.0;  // Darcy-Weisbach friction coefficient

    void validate() const;
};

// P1 stiffness system restricted to interior vertices (drained boundary).
struct PoissonSystem {
    Eigen::SparseMatrix<double> stiffness;   // n_interior x n_interior, SPD
    std::vector<int> interior_index;         // per vertex; -1 on the boundary
    std::vector<int> interior_vertices;      // inverse map

    int n_interior() const { return static_cast<int>(interior_vertices.size()); }
};

struct PressureSolution {
    NodalScalarField p0;  // zero at every boundary vertex
};

PoissonSystem assemble_poisson(const Triangulation& t);

// Pressure correction driven by the surface slope and the external potential.
PressureSolution solve_pressure(const Triangulation& t, const NodalScalarField& zeta,
                                const NodalScalarField& pressure_potential, const FluidParams& params);

// v0 = -(1/a) (grad p0 + grad P + rho g grad zeta), element-wise.
ElementField2 primary_field(const PressureSolution& p, const NodalScalarField& pressure_potential,
                            const NodalScalarField& zeta, const FluidParams& params,
                            const Triangulation& t);

}  // namespace fissflow
