#include "fissflow/io.hpp"

#include <cmath>
#include <fstream>

#include "fissflow/errors.hpp"

namespace fissflow {

void write_vtk(const std::string& path, const Triangulation& t, const std::vector<double>& heights,
               const VtkCellData& cell_data) {
    if (static_cast<int>(heights.size()) != t.n_vertices())
        throw InvalidInputError("vtk: one height per vertex required");
    std::ofstream out(path);
    if (!out) throw ConfigError("vtk: cannot write " + path);
    out.precision(17);

    out << "# vtk DataFile Version 3.0\n";
    out << "fissure surface\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << t.n_vertices() << " double\n";
    for (int v = 0; v < t.n_vertices(); ++v) {
        const Vec2& p = t.vertices[static_cast<std::size_t>(v)];
        out << p.x << ' ' << p.y << ' ' << heights[static_cast<std::size_t>(v)] << '\n';
    }
    out << "CELLS " << t.n_triangles() << ' ' << 4 * t.n_triangles() << '\n';
    for (const auto& tri : t.triangles) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    out << "CELL_TYPES " << t.n_triangles() << '\n';
    for (int k = 0; k < t.n_triangles(); ++k) out << "5\n";

    const bool any = cell_data.velocity || cell_data.psi || cell_data.discharge;
    if (!any) return;
    out << "CELL_DATA " << t.n_triangles() << '\n';
    if (cell_data.velocity) {
        out << "VECTORS velocity double\n";
        for (int k = 0; k < cell_data.velocity->size(); ++k) {
            const Vec3& u = (*cell_data.velocity)[k];
            out << u.x << ' ' << u.y << ' ' << u.z << '\n';
        }
    }
    auto scalars = [&](const char* name, const std::vector<double>& vals) {
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (double v : vals) {
            if (std::isinf(v))
                out << "1e300\n";  // legacy readers reject literal inf
            else
                out << v << '\n';
        }
    };
    if (cell_data.psi) scalars("psi", *cell_data.psi);
    if (cell_data.discharge) scalars("discharge", *cell_data.discharge);
}

}  // namespace fissflow
