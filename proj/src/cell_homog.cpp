#include "thinframe/cell_homog.hpp"

#include "thinframe/numerics.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace thinframe {

double ellipticity(const VoigtMatrix& v) {
    const Eigen::Matrix3d sym = 0.5 * (v.m + v.m.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

MacroTensor MacroTensor::from(const VoigtMatrix& v) {
    MacroTensor t;
    t.voigt = v;
    t.ellipticity = thinframe::ellipticity(v);
    t.elliptic = t.ellipticity >= kEllipticityFloor;
    return t;
}

TrussSystem::TrussSystem(const FrameworkGraph& g, const ElasticTensor& a1) : nodes_(g.node_count()) {
    const double total = g.total_length();
    for (std::size_t l = 0; l < g.link_count(); ++l) {
        const Link& link = g.links()[l];
        members_.push_back(Member{link.a, link.b, g.tangent(l), g.length(l), k1(a1, g.tangent(l)) * g.length(l) / total});
    }
    s_ = Eigen::MatrixXd::Zero(dofs(), dofs());
    for (const Member& mb : members_) {
        if (mb.a == mb.b) continue;  // a periodic translate of one node: no relative motion
        Eigen::VectorXd row = Eigen::VectorXd::Zero(dofs());
        row.segment<2>(2 * mb.a) -= mb.tau / mb.len;
        row.segment<2>(2 * mb.b) += mb.tau / mb.len;
        s_ += mb.weight * row * row.transpose();
    }
}

double TrussSystem::strain(const Member& mb, const Sym2& xi, const Eigen::VectorXd& u) const {
    double e = mb.tau.dot(xi * mb.tau);
    if (u.size() > 0) e += (u.segment<2>(2 * mb.b) - u.segment<2>(2 * mb.a)).dot(mb.tau) / mb.len;
    return e;
}

double TrussSystem::energy(const Sym2& xi, const Eigen::VectorXd& u) const {
    double e = 0.0;
    for (const Member& mb : members_) e += mb.weight * std::pow(strain(mb, xi, u), 2);
    return e;
}

double TrussSystem::polar(const Sym2& xi, const Eigen::VectorXd& u, const Sym2& zeta, const Eigen::VectorXd& v) const {
    double e = 0.0;
    for (const Member& mb : members_) e += mb.weight * strain(mb, xi, u) * strain(mb, zeta, v);
    return e;
}

Eigen::Index TrussSystem::kernel_dimension() const {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s_, Eigen::EigenvaluesOnly).eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    return (ev.array().abs() <= 1e-10 * scale).count();
}

Eigen::VectorXd TrussSystem::minimiser(const Sym2& xi) const {
    const Eigen::Index n = dofs();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
    for (const Member& mb : members_) {
        if (mb.a == mb.b) continue;
        const double s = mb.weight * mb.tau.dot(xi * mb.tau);
        rhs.segment<2>(2 * mb.a) += s * mb.tau / mb.len;
        rhs.segment<2>(2 * mb.b) -= s * mb.tau / mb.len;
    }
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 2, n + 2);
    sys.topLeftCorner(n, n) = s_;
    for (std::size_t k = 0; k < nodes_; ++k) {
        sys(n, 2 * k) = sys(2 * k, n) = 1.0;
        sys(n + 1, 2 * k + 1) = sys(2 * k + 1, n + 1) = 1.0;
    }
    return sys.fullPivLu().solve(rhs).head(n);
}

MacroTensor compute_ahom(const FrameworkGraph& g, const ElasticTensor& a1) {
    const TrussSystem truss(g, a1);
    if (truss.kernel_dimension() != 2)
        throw NumericalError("ill-posed framework: truss has mechanisms beyond rigid translations");
    std::array<Sym2, 3> basis;
    std::array<Eigen::VectorXd, 3> u;
    for (int i = 0; i < 3; ++i) {
        basis[i] = from_voigt(Voigt3(Voigt3::Unit(i)));
        u[i] = truss.minimiser(basis[i]);
    }
    VoigtMatrix v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v.m(i, j) = truss.polar(basis[i], u[i], basis[j], u[j]);
    return MacroTensor::from(v);
}

}  // namespace thinframe
