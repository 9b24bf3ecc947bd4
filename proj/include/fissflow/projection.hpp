#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "fissflow/fields.hpp"
#include "fissflow/mesh.hpp"

namespace fissflow {

// Sparse constraint matrix whose kernel (under the interleaved numbering) is
// exactly the conservative space: one row per interface edge, 4 nonzeros.
struct CharacterizingMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> A;  // n_interface x 2*n_triangles
    std::vector<int> row_edges;                      // edge id per row
    int n_triangles = 0;

    int rows() const { return static_cast<int>(A.rows()); }
};

CharacterizingMatrix characterizing_matrix(const Triangulation& t);

// Orthogonal projection of v0 onto the conservative space: the closest point
// of ker(A) in the Euclidean norm of the numbered vector.
ElementField2 project_conservative(const ElementField2& v0, const CharacterizingMatrix& A);

// Dense cross-check: equality-constrained least squares solved via a
// rank-revealing QR of A^T. Limited to small meshes.
ElementField2 projection_oracle(const ElementField2& v0, const Triangulation& t);

// Debug dump of A in Matrix Market coordinate format.
void write_matrix_market(const std::string& path, const CharacterizingMatrix& A);

}  // namespace fissflow
