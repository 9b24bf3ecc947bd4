#include "fissflow/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fissflow/errors.hpp"
#include "fissflow/io.hpp"

namespace fissflow {

namespace fs = std::filesystem;

namespace {

// true when p lies inside or on the closed triangulated domain
bool inside_domain(const Triangulation& t, const Vec2& p) {
    const double tol = 1e-12;
    for (int k = 0; k < t.n_triangles(); ++k) {
        const auto& tri = t.triangles[static_cast<std::size_t>(k)];
        const Vec2& a = t.vertices[static_cast<std::size_t>(tri[0])];
        const Vec2& b = t.vertices[static_cast<std::size_t>(tri[1])];
        const Vec2& c = t.vertices[static_cast<std::size_t>(tri[2])];
        const double d1 = (b - a).cross(p - a);
        const double d2 = (c - b).cross(p - b);
        const double d3 = (a - c).cross(p - c);
        if (d1 >= -tol && d2 >= -tol && d3 >= -tol) return true;
    }
    return false;
}

std::vector<double> read_nodal_file(const std::string& path, int expected) {
    std::ifstream in(path);
    if (!in) throw ConfigError("nodal file: cannot open " + path);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) != expected)
        throw ConfigError("nodal file: " + path + " has " + std::to_string(vals.size()) +
                          " values, mesh has " + std::to_string(expected) + " vertices");
    return vals;
}

[[noreturn]] void rethrow_tagged(const std::string& stage) {
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError("stage " + stage + ": " + e.what());
    } catch (const InvalidInputError& e) {
        throw InvalidInputError("stage " + stage + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("stage " + stage + ": " + e.what());
    } catch (const MeshError& e) {
        throw MeshError("stage " + stage + ": " + e.what());
    } catch (const std::exception& e) {
        throw NumericError("stage " + stage + ": " + e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg, bool write_outputs) {
    cfg.validate();
    PipelineResult res;
    std::string stage = "config";

    try {
        // mesh + surface heights
        stage = "mesh";
        std::vector<SamplePoint> samples;
        std::optional<std::vector<std::array<int, 3>>> connectivity;
        if (cfg.surface.from_file()) {
            MeshFile mf = read_mesh_file(cfg.surface.file);
            samples = std::move(mf.points);
            connectivity = std::move(mf.connectivity);
        } else {
            const int count = count_for_target_elements(cfg.mesh.target_elements);
            for (const Vec2& p : random_points(count, cfg.mesh.seed))
                samples.push_back({p, surface_preset(cfg.surface.preset, p)});
        }
        res.mesh = build_triangulation(samples, connectivity);
        res.zeta = NodalScalarField(res.mesh.n_vertices(), 0.0);
        for (int i = 0; i < res.mesh.n_vertices(); ++i)
            res.zeta[i] = samples[static_cast<std::size_t>(i)].height;
        res.geometry = lift_geometry(res.mesh, res.zeta.values);

        // external pressure potential (SI nodal interpolant)
        stage = "pressure-potential";
        res.pressure_potential = NodalScalarField(res.mesh.n_vertices(), 0.0);
        if (cfg.pressure.kind == "log-well") {
            if (inside_domain(res.mesh, cfg.pressure.center))
                throw ConfigError("log-well center (" + std::to_string(cfg.pressure.center.x) + ", " +
                                  std::to_string(cfg.pressure.center.y) +
                                  ") lies inside the domain; the singularity would enter the mesh");
            const double to_si = unit_to_si(cfg.pressure.strength.unit);
            for (int i = 0; i < res.mesh.n_vertices(); ++i)
                res.pressure_potential[i] =
                    to_si * pressure_preset(cfg.pressure, res.mesh.vertices[static_cast<std::size_t>(i)]);
        } else if (cfg.pressure.kind == "file") {
            res.pressure_potential =
                NodalScalarField(read_nodal_file(cfg.pressure.file, res.mesh.n_vertices()));
        }

        // Darcy solve and the conservative projection
        stage = "pressure-solve";
        const FluidParams params = cfg.fluid.to_si();
        res.pressure = solve_pressure(res.mesh, res.zeta, res.pressure_potential, params);

        stage = "primary-field";
        res.v0 = primary_field(res.pressure, res.pressure_potential, res.zeta, params, res.mesh);

        stage = "projection";
        const CharacterizingMatrix cm = characterizing_matrix(res.mesh);
        res.v = project_conservative(res.v0, cm);
        const double residual = max_conservation_residual(res.v, res.mesh);
        const double vscale = std::max(res.v.max_norm(), 1e-300);
        if (residual > kConservationTol * vscale)
            throw NumericError("projected field residual " + std::to_string(residual) +
                               " exceeds tolerance");

        stage = "lifting";
        res.u = lift_field(res.v, res.geometry);
        res.streamlines = compute_streamlines(res.v, res.u, res.mesh);

        // transport chain
        stage = "transport";
        res.gen = generator(res.u, res.v, res.geometry, res.mesh);
        res.jumps = jump_chain(res.gen);
        res.forest = assert_forest(flow_graph(res.jumps));
        res.exit_times = expected_exit_times(res.gen);

        stage = "observables";
        res.report = build_report(cfg.experiment, res.u, res.gen, res.jumps, res.streamlines,
                                  res.geometry, params, res.exit_times, res.mesh);

        if (!write_outputs) return res;

        stage = "outputs";
        const fs::path dir(cfg.outputs.directory);
        fs::create_directories(dir);
        auto track = [&](const fs::path& p) {
            res.written_files.push_back(p.string());
            return p.string();
        };

        if (cfg.outputs.vtk) {
            std::vector<double> psi(res.exit_times.psi.data(),
                                    res.exit_times.psi.data() + res.exit_times.psi.size());
            const std::vector<double> q = discharge(res.gen, res.geometry, params.depth);
            VtkCellData cd;
            cd.velocity = &res.u;
            cd.psi = &psi;
            cd.discharge = &q;
            write_vtk(track(dir / (cfg.experiment + "_mesh.vtk")), res.mesh, res.zeta.values, cd);
        }
        if (cfg.outputs.fields_csv) {
            write_field_csv(track(dir / (cfg.experiment + "_v0.csv")), res.v0);
            write_field_csv(track(dir / (cfg.experiment + "_v.csv")), res.v);
            write_field_csv(track(dir / (cfg.experiment + "_u.csv")), res.u);
            write_nodal_csv(track(dir / (cfg.experiment + "_p0.csv")), res.pressure.p0, "p0");
        }
        if (cfg.outputs.psi_csv) {
            std::ofstream out(track(dir / (cfg.experiment + "_psi.csv")));
            out.precision(17);
            out << "tri_id,psi\n";
            for (int k = 0; k < res.gen.n_tri; ++k) {
                out << k << ',';
                if (res.exit_times.finite[static_cast<std::size_t>(k)])
                    out << res.exit_times.psi[k];
                else
                    out << "inf";
                out << '\n';
            }
        }
        if (cfg.outputs.phi_csv && !cfg.times.values.empty()) {
            std::vector<int> elems = cfg.times.elements;
            if (elems.empty()) elems = {0};
            for (int e : elems)
                if (e < 0 || e >= res.gen.n_tri)
                    throw ConfigError("times.elements index " + std::to_string(e) + " out of range");
            std::ofstream out(track(dir / (cfg.experiment + "_phi.csv")));
            out.precision(17);
            out << "t";
            for (int e : elems) out << ",phi_K" << e;
            out << '\n';
            for (double tval : cfg.times.values) {
                const Eigen::VectorXd phi = exit_time_distribution(res.gen, tval);
                out << tval;
                for (int e : elems) out << ',' << phi[e];
                out << '\n';
            }
        }
        if (cfg.outputs.report_csv)
            write_report_csv(track(dir / (cfg.experiment + "_report.csv")), {res.report});

        return res;
    } catch (...) {
        // drop partial outputs, then surface the failing stage
        for (const std::string& f : res.written_files) {
            std::error_code ec;
            fs::remove(f, ec);
        }
        rethrow_tagged(stage);
    }
}

}  // namespace fissflow
