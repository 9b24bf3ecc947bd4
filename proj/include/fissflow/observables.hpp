#pragma once

#include <string>
#include <vector>

#include "fissflow/darcy.hpp"
#include "fissflow/lifting.hpp"
#include "fissflow/transport.hpp"

namespace fissflow {

// Summary scalars of one experiment. Energies are signed powers: positive
// means dissipation, a negative gravity term is energy still being released.
struct EnergyReport {
    std::string experiment;
    Vec3 m_u;                 // preferential flow direction, area-weighted mean velocity
    double U_curv = 0.0;
    double U_fric = 0.0;
    double U_grav = 0.0;
    double balance = 0.0;     // U_curv + U_fric + U_grav
    double mean_exit_time = 0.0;
    bool exit_time_finite = true;
};

// Area-weighted mean of the global field over the lifted surface.
Vec3 preferential_direction(const ElementField3& u, const LiftedGeometry& geo);

// Total discharge out of each element, q_K = -D |K^zeta| Q_KK.
std::vector<double> discharge(const Generator& q, const LiftedGeometry& geo, double depth);

// Kinetic energy invested in redirecting the flux across interfaces, with
// the published jump-probability pair weights |K| Qt_{K,L} + |L| Qt_{L,K}.
double curvature_dissipation(const ElementField3& u, const JumpChain& qt,
                             const LiftedGeometry& geo, const FluidParams& params,
                             const Triangulation& t);

// Darcy-Weisbach wall-friction rate.
double friction_dissipation(const ElementField3& u, const std::vector<double>& q,
                            const StreamlineData& s, const FluidParams& params);

// Rate of potential-energy variation (sign-indefinite).
double gravity_rate(const ElementField3& u, const std::vector<double>& q, const StreamlineData& s,
                    const FluidParams& params);

EnergyReport build_report(const std::string& experiment, const ElementField3& u,
                          const Generator& gen, const JumpChain& qt, const StreamlineData& s,
                          const LiftedGeometry& geo, const FluidParams& params,
                          const ExitTimes& exit_times, const Triangulation& t);

// CSV with a unit-annotation metadata line; velocities in cm/s and energies
// in erg/s to ease side-by-side reading of published tables.
void write_report_csv(const std::string& path, const std::vector<EnergyReport>& reports);
std::vector<EnergyReport> read_report_csv(const std::string& path);

}  // namespace fissflow
