#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fissflow/config.hpp"
#include "fissflow/errors.hpp"
#include "fissflow/pipeline.hpp"
#include "fissflow/projection.hpp"

namespace py = pybind11;
using namespace fissflow;

namespace {

std::vector<SamplePoint> samples_from_arrays(const py::array_t<double>& points,
                                             const py::array_t<double>& heights) {
    const auto p = points.unchecked<2>();
    const auto h = heights.unchecked<1>();
    if (p.shape(1) != 2) throw py::value_error("points must be (n, 2)");
    if (h.shape(0) != p.shape(0)) throw py::value_error("heights must match points");
    std::vector<SamplePoint> s(static_cast<std::size_t>(p.shape(0)));
    for (py::ssize_t i = 0; i < p.shape(0); ++i)
        s[static_cast<std::size_t>(i)] = {{p(i, 0), p(i, 1)}, h(i)};
    return s;
}

py::array_t<double> field_to_array(const ElementField2& f) {
    py::array_t<double> out({f.size(), 2});
    auto w = out.mutable_unchecked<2>();
    for (int k = 0; k < f.size(); ++k) {
        w(k, 0) = f[k].x;
        w(k, 1) = f[k].y;
    }
    return out;
}

py::array_t<double> field_to_array(const ElementField3& f) {
    py::array_t<double> out({f.size(), 3});
    auto w = out.mutable_unchecked<2>();
    for (int k = 0; k < f.size(); ++k) {
        w(k, 0) = f[k].x;
        w(k, 1) = f[k].y;
        w(k, 2) = f[k].z;
    }
    return out;
}

ElementField2 field_from_array(const py::array_t<double>& a) {
    const auto r = a.unchecked<2>();
    if (r.shape(1) != 2) throw py::value_error("field must be (n, 2)");
    ElementField2 f(static_cast<int>(r.shape(0)));
    for (py::ssize_t k = 0; k < r.shape(0); ++k) f[static_cast<int>(k)] = {r(k, 0), r(k, 1)};
    return f;
}

py::dict report_to_dict(const EnergyReport& r) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["m_u"] = py::make_tuple(r.m_u.x, r.m_u.y, r.m_u.z);
    d["U_curv"] = r.U_curv;
    d["U_fric"] = r.U_fric;
    d["U_grav"] = r.U_grav;
    d["balance"] = r.balance;
    d["mean_exit_time"] = r.mean_exit_time;
    d["exit_time_finite"] = r.exit_time_finite;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conservative tangential flow fields and transport on triangulated fissure surfaces";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericError>(m, "NumericError");
    py::register_exception<MeshError>(m, "MeshError");

    py::class_<Triangulation>(m, "Triangulation")
        .def_property_readonly("n_vertices", &Triangulation::n_vertices)
        .def_property_readonly("n_triangles", &Triangulation::n_triangles)
        .def_property_readonly("n_interface_edges",
                               [](const Triangulation& t) { return t.interface_edges.size(); })
        .def_property_readonly("n_boundary_edges",
                               [](const Triangulation& t) { return t.boundary_edges.size(); })
        .def_property_readonly("triangles",
                               [](const Triangulation& t) {
                                   py::array_t<int> out({t.n_triangles(), 3});
                                   auto w = out.mutable_unchecked<2>();
                                   for (int k = 0; k < t.n_triangles(); ++k)
                                       for (int j = 0; j < 3; ++j)
                                           w(k, j) = t.triangles[static_cast<std::size_t>(k)]
                                                                [static_cast<std::size_t>(j)];
                                   return out;
                               })
        .def_property_readonly("vertices", [](const Triangulation& t) {
            py::array_t<double> out({t.n_vertices(), 2});
            auto w = out.mutable_unchecked<2>();
            for (int v = 0; v < t.n_vertices(); ++v) {
                w(v, 0) = t.vertices[static_cast<std::size_t>(v)].x;
                w(v, 1) = t.vertices[static_cast<std::size_t>(v)].y;
            }
            return out;
        });

    m.def(
        "triangulate",
        [](const py::array_t<double>& points, const py::array_t<double>& heights) {
            return build_triangulation(samples_from_arrays(points, heights));
        },
        py::arg("points"), py::arg("heights"), "Delaunay triangulation of 2D sample points");

    m.def(
        "surface_preset",
        [](const std::string& name, double x, double y) { return surface_preset(name, {x, y}); },
        py::arg("name"), py::arg("x"), py::arg("y"));

    m.def(
        "project_conservative",
        [](const Triangulation& t, const py::array_t<double>& v0) {
            const CharacterizingMatrix cm = characterizing_matrix(t);
            return field_to_array(project_conservative(field_from_array(v0), cm));
        },
        py::arg("mesh"), py::arg("v0"),
        "Orthogonal projection of an element field onto the conservative space");

    m.def(
        "conservation_residual",
        [](const Triangulation& t, const py::array_t<double>& v) {
            return max_conservation_residual(field_from_array(v), t);
        },
        py::arg("mesh"), py::arg("v"), "Max interface-normal residual of an element field");

    m.def(
        "run",
        [](const std::string& config_json, bool write_outputs) {
            const PipelineResult res = run_pipeline(parse_config(config_json), write_outputs);
            py::dict d;
            d["report"] = report_to_dict(res.report);
            d["n_triangles"] = res.mesh.n_triangles();
            d["n_vertices"] = res.mesh.n_vertices();
            d["is_forest"] = res.forest.is_forest;
            d["v0"] = field_to_array(res.v0);
            d["v"] = field_to_array(res.v);
            d["u"] = field_to_array(res.u);
            py::array_t<double> psi(res.exit_times.psi.size());
            auto w = psi.mutable_unchecked<1>();
            for (py::ssize_t k = 0; k < psi.size(); ++k) w(k) = res.exit_times.psi[k];
            d["psi"] = psi;
            d["written_files"] = res.written_files;
            return d;
        },
        py::arg("config_json"), py::arg("write_outputs") = false,
        "Run the full pipeline from a JSON configuration string");

    m.def(
        "example_config",
        [](int example, bool with_well, std::uint64_t seed) {
            return serialize_config(example_config(example, with_well, seed));
        },
        py::arg("example"), py::arg("with_well") = false, py::arg("seed") = 1,
        "JSON configuration of one of the built-in experiments");
}
