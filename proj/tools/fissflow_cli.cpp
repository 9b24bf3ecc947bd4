#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fissflow/errors.hpp"
#include "fissflow/pipeline.hpp"
#include "fissflow/projection.hpp"

namespace {

using namespace fissflow;

int cmd_run(const std::string& config_path, const std::string& output_dir) {
    ExperimentConfig cfg = load_config(config_path);
    if (!output_dir.empty()) cfg.outputs.directory = output_dir;
    const PipelineResult res = run_pipeline(cfg);

    std::cout << "experiment: " << cfg.experiment << "\n";
    std::cout << "mesh: " << res.mesh.n_triangles() << " elements, " << res.mesh.n_vertices()
              << " vertices, " << res.mesh.interface_edges.size() << " interface edges\n";
    std::cout << "m[u] (cm/s): (" << res.report.m_u.x * 100 << ", " << res.report.m_u.y * 100
              << ", " << res.report.m_u.z * 100 << ")\n";
    std::cout << "U_curv " << res.report.U_curv * 1e7 << " erg/s, U_fric " << res.report.U_fric * 1e7
              << " erg/s, U_grav " << res.report.U_grav * 1e7 << " erg/s\n";
    if (res.report.exit_time_finite)
        std::cout << "mean exit time: " << res.report.mean_exit_time << " s\n";
    else
        std::cout << "mean exit time: infinite (" << res.exit_times.n_stranded
                  << " stranded elements)\n";
    std::cout << "flow graph forest: " << (res.forest.is_forest ? "yes" : "NO") << "\n";
    for (const std::string& f : res.written_files) std::cout << "wrote " << f << "\n";
    return 0;
}

bool check(bool ok, const std::string& what, int& failures) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
    return ok;
}

// quick invariant sweep on built-in miniature meshes
int cmd_verify() {
    int failures = 0;

    // square split along one diagonal
    std::vector<SamplePoint> sq{{{0, 0}, 0}, {{1, 0}, 0}, {{1, 1}, 0}, {{0, 1}, 0}};
    const Triangulation t2 = build_triangulation(sq);
    check(t2.n_triangles() == 2 && t2.interface_edges.size() == 1, "unit square: 2 elements, 1 interface",
          failures);

    // projection fixes conservative fields and is idempotent
    const CharacterizingMatrix cm = characterizing_matrix(t2);
    const ElementField2 constant(std::vector<Vec2>{{1, 0}, {1, 0}});
    const ElementField2 pc = project_conservative(constant, cm);
    check((numb(pc) - numb(constant)).norm() < 1e-12, "projection fixes a constant field", failures);

    ElementField2 off(std::vector<Vec2>{{1, 0}, {-1, 0}});
    const ElementField2 p1 = project_conservative(off, cm);
    const ElementField2 p2 = project_conservative(p1, cm);
    check((numb(p1) - numb(p2)).norm() < 1e-10, "projection idempotent", failures);
    check(max_conservation_residual(p1, t2) < 1e-10, "projected field conservative", failures);

    // random mesh pipeline invariants
    ExperimentConfig cfg = example_config(1, false, 7);
    cfg.mesh.target_elements = 60;
    const PipelineResult res = run_pipeline(cfg, /*write_outputs=*/false);
    check(max_conservation_residual(res.v, res.mesh) <=
              kConservationTol * std::max(res.v.max_norm(), 1e-300),
          "pipeline field conservative", failures);
    double lift_err = 0.0;
    for (int k = 0; k < res.v.size(); ++k)
        lift_err = std::max(lift_err, std::abs(res.u[k].norm() - res.v[k].norm()));
    check(lift_err < 1e-12 * std::max(1.0, res.v.max_norm()), "lifting preserves norms", failures);
    check(res.forest.is_forest, "flow graph is a forest", failures);
    check(res.exit_times.all_finite, "all exit times finite", failures);

    std::cout << (failures == 0 ? "verify: all checks passed\n"
                                : "verify: " + std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? 0 : 1;
}

int cmd_report_diff(const std::string& a_path, const std::string& b_path, double rtol, double atol) {
    const auto a = read_report_csv(a_path);
    const auto b = read_report_csv(b_path);
    if (a.size() != b.size()) {
        std::cout << "row count differs: " << a.size() << " vs " << b.size() << "\n";
        return 1;
    }
    auto close = [&](double x, double y) {
        if (std::isinf(x) || std::isinf(y)) return std::isinf(x) && std::isinf(y);
        return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
    };
    int diffs = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto cmp = [&](const char* name, double x, double y) {
            if (!close(x, y)) {
                std::cout << "row " << i << " (" << a[i].experiment << "): " << name << " " << x
                          << " vs " << y << "\n";
                ++diffs;
            }
        };
        if (a[i].experiment != b[i].experiment) {
            std::cout << "row " << i << ": experiment name " << a[i].experiment << " vs "
                      << b[i].experiment << "\n";
            ++diffs;
        }
        cmp("m_ux", a[i].m_u.x, b[i].m_u.x);
        cmp("m_uy", a[i].m_u.y, b[i].m_u.y);
        cmp("m_uz", a[i].m_u.z, b[i].m_u.z);
        cmp("U_curv", a[i].U_curv, b[i].U_curv);
        cmp("U_fric", a[i].U_fric, b[i].U_fric);
        cmp("U_grav", a[i].U_grav, b[i].U_grav);
        cmp("balance", a[i].balance, b[i].balance);
        cmp("mean_exit_time", a[i].mean_exit_time, b[i].mean_exit_time);
    }
    std::cout << (diffs == 0 ? "reports match\n" : std::to_string(diffs) + " field(s) differ\n");
    return diffs == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conservative tangential flow and transport on triangulated fissure surfaces"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    auto* run = app.add_subcommand("run", "run a full experiment from a config file");
    run->add_option("config", config_path, "JSON configuration file")->required();
    run->add_option("--output-dir", output_dir, "override the configured output directory");

    auto* verify = app.add_subcommand("verify", "run the invariant suite on built-in meshes");

    std::string diff_a, diff_b;
    double rtol = 1e-6, atol = 0.0;
    auto* rdiff = app.add_subcommand("report-diff", "compare two report CSV files");
    rdiff->add_option("a", diff_a, "first report")->required();
    rdiff->add_option("b", diff_b, "second report")->required();
    rdiff->add_option("--rtol", rtol, "relative tolerance");
    rdiff->add_option("--atol", atol, "absolute tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, output_dir);
        if (verify->parsed()) return cmd_verify();
        if (rdiff->parsed()) return cmd_report_diff(diff_a, diff_b, rtol, atol);
    } catch (const fissflow::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
