#include "fissflow/observables.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fissflow/errors.hpp"

namespace fissflow {

namespace {

constexpr double kWattToErgPerSec = 1e7;
constexpr double kMeterToCm = 100.0;

}  // namespace

Vec3 preferential_direction(const ElementField3& u, const LiftedGeometry& geo) {
    if (u.size() != static_cast<int>(geo.area3d.size()))
        throw InvalidInputError("preferential_direction: field size mismatch");
    Vec3 acc;
    double total_area = 0.0;
    for (int k = 0; k < u.size(); ++k) {
        const double a = geo.area3d[static_cast<std::size_t>(k)];
        acc += u[k] * a;
        total_area += a;
    }
    return acc / total_area;
}

std::vector<double> discharge(const Generator& gen, const LiftedGeometry& geo, double depth) {
    if (gen.n_tri != static_cast<int>(geo.area3d.size()))
        throw InvalidInputError("discharge: generator does not match the geometry");
    std::vector<double> q(static_cast<std::size_t>(gen.n_tri), 0.0);
    for (int k = 0; k < gen.n_tri; ++k)
        q[static_cast<std::size_t>(k)] = -depth * geo.area3d[static_cast<std::size_t>(k)] * gen.Q.coeff(k, k);
    return q;
}

double curvature_dissipation(const ElementField3& u, const JumpChain& qt,
                             const LiftedGeometry& geo, const FluidParams& params,
                             const Triangulation& t) {
    if (u.size() != t.n_triangles() || qt.n_tri != t.n_triangles())
        throw InvalidInputError("curvature_dissipation: input size mismatch");

    // each unordered interface pair carries a summand symmetric in (K, L); the
    // ordered double sum over neighbors is exactly twice this loop
    double acc = 0.0;
    for (int ei : t.interface_edges) {
        const Edge& e = t.edges[static_cast<std::size_t>(ei)];
        const int K = e.left, L = e.right;
        const Vec3& nu_kl = geo.conormal_left[static_cast<std::size_t>(ei)];
        const Vec3& nu_lk = geo.conormal_right[static_cast<std::size_t>(ei)];
        const double p_kl = qt.Qt.coeff(K, L), p_lk = qt.Qt.coeff(L, K);

        // at most one side can discharge through a shared edge
        if (std::min(p_kl, p_lk) > 1e-10)
            throw NumericError("curvature_dissipation: both sides of edge " + std::to_string(ei) +
                               " discharge; the flux field is not conservative");

        const double w = geo.area3d[static_cast<std::size_t>(K)] * p_kl +
                         geo.area3d[static_cast<std::size_t>(L)] * p_lk;
        const Vec3 delta = nu_kl * u[K].dot(nu_kl) - nu_lk * u[L].dot(nu_lk);
        acc += w * delta.squared_norm();
    }
    return params.rho * params.depth * acc;  // = (1/2) rho D * ordered double sum
}

double friction_dissipation(const ElementField3& u, const std::vector<double>& q,
                            const StreamlineData& s, const FluidParams& params) {
    if (static_cast<int>(q.size()) != u.size() || static_cast<int>(s.d.size()) != u.size())
        throw InvalidInputError("friction_dissipation: input size mismatch");
    double acc = 0.0;
    for (int k = 0; k < u.size(); ++k)
        acc += q[static_cast<std::size_t>(k)] * (s.d[static_cast<std::size_t>(k)] / params.depth) *
               u[k].squared_norm();
    return 0.5 * params.rho * params.gamma * acc;
}

double gravity_rate(const ElementField3& u, const std::vector<double>& q, const StreamlineData& s,
                    const FluidParams& params) {
    if (static_cast<int>(q.size()) != u.size() || static_cast<int>(s.alpha.size()) != u.size())
        throw InvalidInputError("gravity_rate: input size mismatch");
    double acc = 0.0;
    for (int k = 0; k < u.size(); ++k)
        acc += q[static_cast<std::size_t>(k)] * s.alpha[static_cast<std::size_t>(k)] * u[k].z;
    return 0.5 * params.rho * params.g * acc;
}

EnergyReport build_report(const std::string& experiment, const ElementField3& u,
                          const Generator& gen, const JumpChain& qt, const StreamlineData& s,
                          const LiftedGeometry& geo, const FluidParams& params,
                          const ExitTimes& exit_times, const Triangulation& t) {
    EnergyReport r;
    r.experiment = experiment;
    r.m_u = preferential_direction(u, geo);
    const std::vector<double> q = discharge(gen, geo, params.depth);
    r.U_curv = curvature_dissipation(u, qt, geo, params, t);
    r.U_fric = friction_dissipation(u, q, s, params);
    r.U_grav = gravity_rate(u, q, s, params);
    r.balance = r.U_curv + r.U_fric + r.U_grav;

    r.exit_time_finite = exit_times.all_finite;
    if (exit_times.all_finite && exit_times.psi.size() > 0) {
        r.mean_exit_time = exit_times.psi.mean();
    } else {
        r.mean_exit_time = std::numeric_limits<double>::infinity();
    }
    return r;
}

void write_report_csv(const std::string& path, const std::vector<EnergyReport>& reports) {
    std::ofstream out(path);
    if (!out) throw ConfigError("report: cannot write " + path);
    out.precision(17);
    out << "# units: m_u [cm/s]; U_curv,U_fric,U_grav,balance [erg/s]; mean_exit_time [s]; "
           "internal SI, converted on output; source parameter units are as annotated in the "
           "config (published CGS/SI declarations conflict, see README)\n";
    out << "experiment,m_ux,m_uy,m_uz,U_curv,U_fric,U_grav,balance,mean_exit_time\n";
    for (const EnergyReport& r : reports) {
        out << r.experiment << ',' << r.m_u.x * kMeterToCm << ',' << r.m_u.y * kMeterToCm << ','
            << r.m_u.z * kMeterToCm << ',' << r.U_curv * kWattToErgPerSec << ','
            << r.U_fric * kWattToErgPerSec << ',' << r.U_grav * kWattToErgPerSec << ','
            << r.balance * kWattToErgPerSec << ',';
        if (r.exit_time_finite)
            out << r.mean_exit_time;
        else
            out << "inf";
        out << '\n';
    }
}

std::vector<EnergyReport> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot open " + path);
    std::vector<EnergyReport> reports;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        EnergyReport r;
        std::string field;
        std::getline(ls, r.experiment, ',');
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw ConfigError("report: short row in " + path);
            if (field == "inf") return std::numeric_limits<double>::infinity();
            return std::stod(field);
        };
        r.m_u.x = next() / kMeterToCm;
        r.m_u.y = next() / kMeterToCm;
        r.m_u.z = next() / kMeterToCm;
        r.U_curv = next() / kWattToErgPerSec;
        r.U_fric = next() / kWattToErgPerSec;
        r.U_grav = next() / kWattToErgPerSec;
        r.balance = next() / kWattToErgPerSec;
        r.mean_exit_time = next();
        r.exit_time_finite = std::isfinite(r.mean_exit_time);
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace fissflow
