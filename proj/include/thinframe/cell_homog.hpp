#pragma once

#include "thinframe/geometry.hpp"
#include "thinframe/materials.hpp"

#include <Eigen/Core>

namespace thinframe {

/// Homogenised tensor of the network with its smallest Voigt eigenvalue.
struct MacroTensor {
    VoigtMatrix voigt;
    double ellipticity = 0.0;
    bool elliptic = false;

    static MacroTensor from(const VoigtMatrix& v);
};

/// Smallest eigenvalue of a symmetric Voigt matrix.
double ellipticity(const VoigtMatrix& v);
inline constexpr double kEllipticityFloor = 1e-10;

/// Relaxed cell problem on the singular network: nodal displacements of a
/// periodic pin-jointed truss, one affine tangential field per link.
///
/// Energy(xi, u) = sum_l (len_l / L_tot) K1 (tau.xi.tau + (u_b - u_a).tau / len_l)^2.
class TrussSystem {
public:
    TrussSystem(const FrameworkGraph& g, const ElasticTensor& a1);

    Eigen::Index dofs() const { return 2 * static_cast<Eigen::Index>(nodes_); }
    /// Hessian / 2 of the energy in u.
    const Eigen::MatrixXd& stiffness() const { return s_; }
    double energy(const Sym2& xi, const Eigen::VectorXd& u) const;
    /// Minimiser with zero mean nodal displacement.
    Eigen::VectorXd minimiser(const Sym2& xi) const;
    /// Bilinear form at two strains, each with its own displacement field.
    double polar(const Sym2& xi, const Eigen::VectorXd& u, const Sym2& zeta, const Eigen::VectorXd& v) const;
    /// Dimension of the null space of the stiffness.
    Eigen::Index kernel_dimension() const;

private:
    struct Member {
        int a, b;
        Eigen::Vector2d tau;
        double len;
        double weight;  // K1 len / L_tot
    };
    double strain(const Member& mb, const Sym2& xi, const Eigen::VectorXd& u) const;

    std::size_t nodes_;
    std::vector<Member> members_;
    Eigen::MatrixXd s_;
};

/// lambda-homogenised tensor by three basis solves and polarisation.
/// Throws NumericalError when the truss has mechanisms beyond translations.
MacroTensor compute_ahom(const FrameworkGraph& g, const ElasticTensor& a1);

}  // namespace thinframe
