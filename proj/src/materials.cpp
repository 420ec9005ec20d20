#include "thinframe/materials.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace thinframe {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Voigt3 to_voigt(const Sym2& xi) { return {xi(0, 0), xi(1, 1), kSqrt2 * 0.5 * (xi(0, 1) + xi(1, 0))}; }

Sym2 from_voigt(const Voigt3& v) {
    Sym2 xi;
    xi << v(0), v(2) / kSqrt2, v(2) / kSqrt2, v(1);
    return xi;
}

ElasticTensor::ElasticTensor(double lame_, double shear_) : lame(lame_), shear(shear_) {
    if (!(shear > 0.0)) throw MaterialError("shear modulus must be positive");
    if (!(lame + shear > 0.0)) throw MaterialError("lame + shear must be positive");
}

Sym2 ElasticTensor::apply(const Sym2& xi) const {
    return 2.0 * shear * xi + lame * xi.trace() * Sym2::Identity();
}

double ElasticTensor::coercivity() const { return 2.0 * std::min(shear, lame + shear); }

VoigtMatrix to_voigt(const ElasticTensor& a) {
    VoigtMatrix v;
    const double d = a.lame + 2.0 * a.shear;
    v.m << d, a.lame, 0.0,
           a.lame, d, 0.0,
           0.0, 0.0, 2.0 * a.shear;
    return v;
}

ElasticTensor from_voigt(const VoigtMatrix& v, double tol) {
    const Eigen::Matrix3d& m = v.m;
    const double lame = m(0, 1);
    const double shear = 0.5 * m(2, 2);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (std::abs(m(0, 1) - m(1, 0)) > tol * scale || std::abs(m(0, 0) - m(1, 1)) > tol * scale ||
        std::abs(m(0, 0) - (lame + 2.0 * shear)) > tol * scale || std::abs(m(0, 2)) > tol * scale ||
        std::abs(m(1, 2)) > tol * scale || std::abs(m(2, 0)) > tol * scale || std::abs(m(2, 1)) > tol * scale)
        throw MaterialError("Voigt matrix is not isotropic");
    return ElasticTensor(lame, shear);
}

double k1(const ElasticTensor& a, const Eigen::Vector2d& tau) {
    if (std::abs(tau.norm() - 1.0) > 1e-12) throw MaterialError("link tangent must be a unit vector");
    const Eigen::Matrix3d m = to_voigt(a).m;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
    if (!lu.isInvertible()) throw MaterialError("singular elasticity tensor");
    const Voigt3 eta = to_voigt(Sym2(tau * tau.transpose()));
    return 1.0 / eta.dot(lu.solve(eta));
}

double k1_isotropic(const ElasticTensor& a) {
    return 4.0 * a.shear * (a.lame + a.shear) / (a.lame + 2.0 * a.shear);
}

}  // namespace thinframe
