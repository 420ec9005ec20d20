#include "thinframe/cell_homog.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace thinframe;

namespace {

Eigen::Matrix3d quarter_turn_voigt() {
    // strain xi -> R xi R^T for R the rotation by pi/2, in Voigt coordinates
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    q(0, 1) = 1.0;
    q(1, 0) = 1.0;
    q(2, 2) = -1.0;
    return q;
}

}  // namespace

TEST(Ahom, GridClosedForm) {
    const ElasticTensor a1(1.0, 1.0);
    const MacroTensor m = compute_ahom(build_preset("grid"), a1);
    const double k = k1_isotropic(a1);
    Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
    expect(0, 0) = expect(1, 1) = k / 2.0;
    EXPECT_LE((m.voigt.m - expect).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(m.ellipticity, 0.0, 1e-12);
    EXPECT_FALSE(m.elliptic);
}

TEST(Ahom, GridMatchesSampledNetwork) {
    const ElasticTensor a1(0.3, 0.7);
    const FrameworkGraph g = build_preset("grid");
    const Eigen::Matrix3d brute = oracles::network_ahom(g, k1_isotropic(a1));
    EXPECT_LE((compute_ahom(g, a1).voigt.m - brute).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Ahom, GridDiagSymmetryAndOracle) {
    const ElasticTensor a1(1.0, 1.0);
    const FrameworkGraph g = build_preset("grid-diag");
    const MacroTensor m = compute_ahom(g, a1);
    const Eigen::Matrix3d& v = m.voigt.m;
    EXPECT_NEAR(v(0, 0), v(1, 1), 1e-10);
    EXPECT_NEAR(v(0, 2), 0.0, 1e-10);
    EXPECT_NEAR(v(1, 2), 0.0, 1e-10);
    EXPECT_GT(v(2, 2), 1e-3 * k1_isotropic(a1));
    const Eigen::Matrix3d q = quarter_turn_voigt();
    EXPECT_LE((q * v * q.transpose() - v).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(m.elliptic);
    EXPECT_GT(m.ellipticity, 0.0);
    const Eigen::Matrix3d brute = oracles::network_ahom(g, k1_isotropic(a1));
    EXPECT_LE((v - brute).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Ahom, ZeroStrainHasZeroMinimiser) {
    const TrussSystem t(build_preset("grid-diag"), ElasticTensor(1.0, 1.0));
    const Eigen::VectorXd u = t.minimiser(Sym2::Zero());
    EXPECT_LE(u.norm(), 1e-14);
    EXPECT_EQ(t.energy(Sym2::Zero(), u), 0.0);
    EXPECT_EQ(t.kernel_dimension(), 2);
}

TEST(Ahom, HomogeneousInA1) {
    const FrameworkGraph g = build_preset("grid-diag");
    const ElasticTensor a1(0.4, 0.9);
    const Eigen::Matrix3d base = compute_ahom(g, a1).voigt.m;
    const Eigen::Matrix3d scaled = compute_ahom(g, a1.scaled(3.5)).voigt.m;
    EXPECT_LE((scaled - 3.5 * base).cwiseAbs().maxCoeff(), 1e-12 * base.cwiseAbs().maxCoeff() * 3.5);
}

TEST(Ahom, InvariantUnderLinkReversal) {
    const FrameworkGraph g = build_preset("grid-diag");
    const ElasticTensor a1(1.0, 1.0);
    const Eigen::Matrix3d base = compute_ahom(g, a1).voigt.m;
    for (std::size_t l = 0; l < g.link_count(); ++l)
        EXPECT_LE((compute_ahom(g.with_reversed_link(l), a1).voigt.m - base).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ahom, UpperBoundAtZeroDisplacement) {
    const FrameworkGraph g = build_preset("grid-diag");
    const ElasticTensor a1(1.0, 1.0);
    const TrussSystem t(g, a1);
    const VoigtMatrix v = compute_ahom(g, a1).voigt;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(t.dofs());
    for (int i = 0; i < 3; ++i) {
        const Sym2 xi = from_voigt(Voigt3(Voigt3::Unit(i)));
        EXPECT_LE(v.form(xi, xi), t.energy(xi, zero) + 1e-14);
    }
    // equality on axis strains for the grid
    const FrameworkGraph grid = build_preset("grid");
    const TrussSystem tg(grid, a1);
    const VoigtMatrix vg = compute_ahom(grid, a1).voigt;
    const Sym2 e11 = from_voigt(Voigt3(Voigt3::Unit(0)));
    EXPECT_NEAR(vg.form(e11, e11), tg.energy(e11, Eigen::VectorXd::Zero(tg.dofs())), 1e-14);
}

TEST(Ellipticity, IdentityVoigt) { EXPECT_NEAR(ellipticity(VoigtMatrix{Eigen::Matrix3d::Identity()}), 1.0, 1e-15); }
