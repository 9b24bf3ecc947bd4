#pragma once

#include <string>
#include <vector>

#include "fissflow/fields.hpp"
#include "fissflow/mesh.hpp"

namespace fissflow {

// Optional per-cell attachments for the VTK export.
struct VtkCellData {
    const ElementField3* velocity = nullptr;      // written as VECTORS
    const std::vector<double>* psi = nullptr;     // expected exit time
    const std::vector<double>* discharge = nullptr;
};

// Legacy ASCII unstructured grid; points carry the lifted elevation.
void write_vtk(const std::string& path, const Triangulation& t, const std::vector<double>& heights,
               const VtkCellData& cell_data = {});

}  // namespace fissflow
