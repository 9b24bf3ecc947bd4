#include "fissflow/projection.hpp"

#include <fstream>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "fissflow/errors.hpp"

namespace fissflow {

CharacterizingMatrix characterizing_matrix(const Triangulation& t) {
    CharacterizingMatrix cm;
    cm.n_triangles = t.n_triangles();
    const int rows = static_cast<int>(t.interface_edges.size());
    cm.A.resize(rows, 2 * t.n_triangles());
    cm.row_edges.reserve(static_cast<std::size_t>(rows));

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(4 * rows));
    int r = 0;
    for (int ei : t.interface_edges) {
        const Edge& e = t.edges[static_cast<std::size_t>(ei)];
        trip.emplace_back(r, 2 * e.left, e.nu.x);
        trip.emplace_back(r, 2 * e.left + 1, e.nu.y);
        trip.emplace_back(r, 2 * e.right, -e.nu.x);
        trip.emplace_back(r, 2 * e.right + 1, -e.nu.y);
        cm.row_edges.push_back(ei);
        ++r;
    }
    cm.A.setFromTriplets(trip.begin(), trip.end());
    return cm;
}

ElementField2 project_conservative(const ElementField2& v0, const CharacterizingMatrix& cm) {
    if (v0.size() != cm.n_triangles)
        throw InvalidInputError("project_conservative: field size does not match the matrix");
    if (cm.rows() == 0) return v0;  // no interface constraints: projection is the identity

    const Eigen::VectorXd x = numb(v0);
    const Eigen::VectorXd rhs = cm.A * x;

    // solve (A A^T) y = A x; Cholesky first, least-squares fallback on rank deficiency
    const Eigen::SparseMatrix<double> gram = (cm.A * Eigen::SparseMatrix<double, Eigen::RowMajor>(cm.A.transpose()))
                                                 .pruned();
    Eigen::VectorXd y;
    bool ok = false;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(gram);
    if (chol.info() == Eigen::Success) {
        y = chol.solve(rhs);
        const double rn = rhs.norm();
        ok = rn == 0.0 || (gram * y - rhs).norm() <= 1e-10 * rn;
    }
    if (!ok) {
        Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double, Eigen::RowMajor>> lscg;
        lscg.setTolerance(1e-14);
        lscg.setMaxIterations(20 * cm.A.cols());
        // minimize ||A^T y - x||: its residual is the kernel projection itself
        lscg.compute(Eigen::SparseMatrix<double, Eigen::RowMajor>(cm.A.transpose()));
        y = lscg.solve(x);
        if (lscg.info() != Eigen::Success && lscg.info() != Eigen::NoConvergence)
            throw NumericError("project_conservative: least-squares fallback failed");
    }
    return unnumb(x - cm.A.transpose() * y);
}

ElementField2 projection_oracle(const ElementField2& v0, const Triangulation& t) {
    if (t.n_triangles() > 200)
        throw InvalidInputError("projection_oracle: dense path limited to 200 elements, got " +
                                std::to_string(t.n_triangles()));
    if (v0.size() != t.n_triangles())
        throw InvalidInputError("projection_oracle: field size mismatch");

    const CharacterizingMatrix cm = characterizing_matrix(t);
    if (cm.rows() == 0) return v0;

    const Eigen::MatrixXd At = Eigen::MatrixXd(cm.A).transpose();  // 2#T x m
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(At);
    const Eigen::Index rank = qr.rank();
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Z = Q.rightCols(At.rows() - rank);  // orthonormal basis of ker(A)

    const Eigen::VectorXd x = numb(v0);
    return unnumb(Z * (Z.transpose() * x));
}

void write_matrix_market(const std::string& path, const CharacterizingMatrix& cm) {
    std::ofstream out(path);
    if (!out) throw ConfigError("matrix market: cannot write " + path);
    out.precision(17);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << cm.A.rows() << ' ' << cm.A.cols() << ' ' << cm.A.nonZeros() << '\n';
    for (int k = 0; k < cm.A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(cm.A, k); it; ++it)
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
}

}  // namespace fissflow
