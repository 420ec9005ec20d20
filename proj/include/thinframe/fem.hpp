#pragma once

// Vector P1 triangle kernels shared by the cell, macro and fine-scale solvers.

#include "thinframe/materials.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace thinframe::fem {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using StrainMap = Eigen::Matrix<double, 3, 6>;

/// Interior 3-point rule, exact for quadratics: barycentric (2/3, 1/6, 1/6) and permutations.
inline std::array<Eigen::Vector3d, 3> quadrature_bary() {
    return {Eigen::Vector3d(2.0 / 3, 1.0 / 6, 1.0 / 6), Eigen::Vector3d(1.0 / 6, 2.0 / 3, 1.0 / 6),
            Eigen::Vector3d(1.0 / 6, 1.0 / 6, 2.0 / 3)};
}

inline double signed_area(const std::array<Eigen::Vector2d, 3>& p) {
    return 0.5 * ((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
}

/// Voigt strain (e11, e22, sqrt2 e12) of the DOF vector (u0x, u0y, u1x, u1y, u2x, u2y).
inline StrainMap strain_map(const std::array<Eigen::Vector2d, 3>& p) {
    const double two_a = 2.0 * signed_area(p);
    const double r2 = std::sqrt(2.0) / 2.0;
    StrainMap b = StrainMap::Zero();
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d& pj = p[(i + 1) % 3];
        const Eigen::Vector2d& pk = p[(i + 2) % 3];
        const double bx = (pj.y() - pk.y()) / two_a;
        const double cy = (pk.x() - pj.x()) / two_a;
        b(0, 2 * i) = bx;
        b(1, 2 * i + 1) = cy;
        b(2, 2 * i) = r2 * cy;
        b(2, 2 * i + 1) = r2 * bx;
    }
    return b;
}

/// coeff * int_T D e(u) . e(v).
inline Matrix6 stiffness(const std::array<Eigen::Vector2d, 3>& p, const Eigen::Matrix3d& d, double coeff) {
    const StrainMap b = strain_map(p);
    return (coeff * std::abs(signed_area(p))) * (b.transpose() * d * b);
}

/// int_T w u . v with w given at the three interior quadrature points.
inline Matrix6 mass(const std::array<Eigen::Vector2d, 3>& p, const Eigen::Vector3d& weight_at_qp) {
    const double area = std::abs(signed_area(p));
    const auto qp = quadrature_bary();
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (int q = 0; q < 3; ++q) s += (area / 3.0) * weight_at_qp[q] * qp[q] * qp[q].transpose();
    Matrix6 m = Matrix6::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            m(2 * i, 2 * j) = s(i, j);
            m(2 * i + 1, 2 * j + 1) = s(i, j);
        }
    return m;
}

inline Matrix6 mass(const std::array<Eigen::Vector2d, 3>& p, double coeff) {
    return mass(p, Eigen::Vector3d::Constant(coeff));
}

}  // namespace thinframe::fem
