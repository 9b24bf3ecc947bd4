#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fissflow/mesh.hpp"

namespace fissflow {

// Absolute tolerance on interface normal components, scaled by the max field
// magnitude, under which a field counts as conservative.
constexpr double kConservationTol = 1e-10;

// P1 nodal scalar field (one value per mesh vertex).
struct NodalScalarField {
    std::vector<double> values;

    NodalScalarField() = default;
    explicit NodalScalarField(std::vector<double> v) : values(std::move(v)) {}
    NodalScalarField(int n, double fill) : values(static_cast<std::size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

// Element-wise constant 2D vector field.
struct ElementField2 {
    std::vector<Vec2> vectors;

    ElementField2() = default;
    explicit ElementField2(std::vector<Vec2> v) : vectors(std::move(v)) {}
    explicit ElementField2(int n) : vectors(static_cast<std::size_t>(n)) {}

    int size() const { return static_cast<int>(vectors.size()); }
    const Vec2& operator[](int k) const { return vectors[static_cast<std::size_t>(k)]; }
    Vec2& operator[](int k) { return vectors[static_cast<std::size_t>(k)]; }

    double max_norm() const {
        double m = 0.0;
        for (const Vec2& v : vectors) m = std::max(m, v.norm());
        return m;
    }
};

// Element-wise constant 3D vector field (tangential when produced by lifting).
struct ElementField3 {
    std::vector<Vec3> vectors;

    ElementField3() = default;
    explicit ElementField3(std::vector<Vec3> v) : vectors(std::move(v)) {}
    explicit ElementField3(int n) : vectors(static_cast<std::size_t>(n)) {}

    int size() const { return static_cast<int>(vectors.size()); }
    const Vec3& operator[](int k) const { return vectors[static_cast<std::size_t>(k)]; }
    Vec3& operator[](int k) { return vectors[static_cast<std::size_t>(k)]; }

    double max_norm() const {
        double m = 0.0;
        for (const Vec3& v : vectors) m = std::max(m, v.norm());
        return m;
    }
};

// Per-element gradient of the affine interpolant of a nodal field.
ElementField2 gradient_p1(const NodalScalarField& q, const Triangulation& t);

// Flat interleaved layout (x1, y1, x2, y2, ...); numb/unnumb are inverse.
Eigen::VectorXd numb(const ElementField2& v);
ElementField2 unnumb(const Eigen::VectorXd& x);

// Residual v_K.nu + v_L.nu' on each interface edge; all zero (to tolerance)
// exactly for conservative fields.
std::vector<double> conservation_residual(const ElementField2& v, const Triangulation& t);
double max_conservation_residual(const ElementField2& v, const Triangulation& t);

// CSV exports: "tri_id,vx,vy[,vz]" and "vertex_id,<name>".
void write_field_csv(const std::string& path, const ElementField2& v);
void write_field_csv(const std::string& path, const ElementField3& v);
void write_nodal_csv(const std::string& path, const NodalScalarField& q, const std::string& name);

}  // namespace fissflow
