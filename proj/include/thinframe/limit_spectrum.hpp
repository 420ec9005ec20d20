#pragma once

#include "thinframe/macro_fem.hpp"
#include "thinframe/micro_spectral.hpp"

#include <Eigen/Core>

#include <vector>

namespace thinframe {

/// One distinct micro eigenvalue with the summed outer products of the
/// averages of its eigenfunctions.
struct Cluster {
    double omega = 0.0;
    int multiplicity = 0;
    Eigen::Matrix2d weight = Eigen::Matrix2d::Zero();
    bool silent = false;  // every eigenfunction has zero average
};

/// Relative spacing below which computed eigenvalues are taken as one.
inline constexpr double kClusterTol = 1e-6;

/// beta(s) = s (I + s sum_n <phi_n> (x) <phi_n> / (omega_n - s)).
class BetaFunction {
public:
    /// Uses the first `modes` eigenpairs. A cluster split by that cut is
    /// completed from the computed modes, or dropped when it reaches the last
    /// computed mode and may continue past it.
    BetaFunction(const MicroSpectrum& spectrum, int modes, bool isotropic);
    /// Direct construction from eigenvalues and averages (ascending omega).
    BetaFunction(const std::vector<double>& omega, const std::vector<Vec2>& averages, bool isotropic);

    Eigen::Matrix2d matrix(double s) const;
    /// tr beta / 2, after checking isotropy when the framework is symmetric.
    double scalar(double s) const;
    /// Bound on the contribution of the discarded modes, from the Bessel
    /// remainder 1 - sum |<phi_n>_i|^2 of each component.
    double tail_bound(double s) const;

    const std::vector<Cluster>& clusters() const { return clusters_; }
    std::vector<double> poles() const;
    std::vector<double> silent() const;
    int modes_used() const { return used_; }
    bool isotropic() const { return isotropic_; }

private:
    void build(const std::vector<double>& omega, const std::vector<Vec2>& averages, const std::vector<bool>& zero);

    std::vector<Cluster> clusters_;
    double remainder_ = 0.0;
    double last_omega_ = 0.0;
    int used_ = 0;
    bool isotropic_;
};

/// Relative isotropy tolerance for beta on symmetric frameworks.
inline constexpr double kIsotropyTol = 1e-6;

/// Zeros of b: 0 followed by one zero between each pair of consecutive poles.
std::vector<double> find_gammas(const BetaFunction& bf);

/// Root of b(s) = target on the increasing branch (lo, hi) by bisection.
double solve_branch(const BetaFunction& bf, double lo, double hi, double target);

struct Band {
    int branch = 0;               // n: band lies in (gamma_n, delta_n]
    double lo = 0.0, hi = 0.0;    // closed interval [first preimage, delta_n]
    std::vector<double> points;   // preimages of the macro eigenvalues
};

struct BandStructure {
    std::vector<double> gamma, delta, alpha;
    std::vector<Band> bands;
    std::vector<std::pair<double, double>> gaps;  // (delta_n, gamma_{n+1})
    std::vector<double> lambda;

    /// Band points, poles and silent points, ascending.
    std::vector<double> skeleton() const;
};

BandStructure assemble_bands(const BetaFunction& bf, const std::vector<double>& gammas,
                             const std::vector<double>& lambda);

struct HomogenisedSolution {
    Eigen::VectorXd u0;          // all-vertex nodal macro field
    Eigen::MatrixXd c;           // all-vertex nodal c_n, one column per mode
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    double residual = 0.0;       // relative residual of the two-scale identity
    double energy = 0.0;         // b_macro(u0, u0) + sum_n omega_n |c_n|^2
    int modes = 0;
};

/// Homogenised source problem with f sampled at the macro vertices.
/// `micro` and `spectrum` may be null when modes == 0.
HomogenisedSolution solve_homogenised(const MacroSpace& space, const MacroTensor& ahom, const Field& f,
                                      const MicroSystem* micro, const MicroSpectrum* spectrum, int modes);

}  // namespace thinframe
