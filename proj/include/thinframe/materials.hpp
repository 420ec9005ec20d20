#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace thinframe {

using Sym2 = Eigen::Matrix2d;
using Voigt3 = Eigen::Vector3d;

class MaterialError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strain (xi11, xi22, sqrt(2) xi12). The sqrt(2) keeps the Voigt matrix of a
/// tensor equal to its Gram matrix: A xi . xi == v^T M v.
Voigt3 to_voigt(const Sym2& xi);
Sym2 from_voigt(const Voigt3& v);

/// Symmetric 3x3 matrix acting on orthonormal Voigt strain vectors.
struct VoigtMatrix {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();

    double form(const Sym2& xi, const Sym2& zeta) const { return to_voigt(xi).dot(m * to_voigt(zeta)); }
    Sym2 apply(const Sym2& xi) const { return from_voigt(m * to_voigt(xi)); }
};

/// Isotropic 2D elasticity tensor A xi = 2 mu xi + lambda tr(xi) I.
struct ElasticTensor {
    double lame = 0.0;
    double shear = 1.0;

    ElasticTensor() = default;
    /// Throws MaterialError unless mu > 0 and lambda + mu > 0.
    ElasticTensor(double lame_, double shear_);

    Sym2 apply(const Sym2& xi) const;
    double form(const Sym2& xi, const Sym2& zeta) const { return apply(xi).cwiseProduct(zeta).sum(); }
    /// Lower bound c of A xi . xi >= c |xi|^2.
    double coercivity() const;

    ElasticTensor scaled(double c) const { return {lame * c, shear * c}; }
};

VoigtMatrix to_voigt(const ElasticTensor& a);
/// Inverse of to_voigt; throws MaterialError for a non-isotropic matrix.
ElasticTensor from_voigt(const VoigtMatrix& m, double tol = 1e-12);

/// Axial stiffness of a link with unit tangent tau: (A^{-1} eta . eta)^{-1}, eta = tau (x) tau.
double k1(const ElasticTensor& a, const Eigen::Vector2d& tau);

/// Closed form 4 mu (lambda + mu) / (lambda + 2 mu) for isotropic tensors.
double k1_isotropic(const ElasticTensor& a);

}  // namespace thinframe
