#include "thinframe/micro_spectral.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace thinframe;

namespace {

MicroParameters defaults(double theta = 0.5) { return {ElasticTensor(0.0, 0.1), ElasticTensor(1.0, 1.0), theta}; }

struct Fixture {
    FrameworkGraph g = build_preset("grid-diag");
    MicroSystem sys{build_cell_mesh(g, 16), g, defaults()};
    MicroSpectrum sp = solve_micro(sys, 12);
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST(MicroAssembly, ConstantFieldHasUnitMass) {
    const Fixture& f = fixture();
    for (const Vec2 c : {Vec2(1.0, 0.0), Vec2(0.0, 1.0)}) {
        const Eigen::VectorXd u = f.sys.constant_field(c);
        EXPECT_NEAR(f.sys.full_mass().quad(u), 1.0, 1e-12);
    }
}

TEST(MicroAssembly, ThetaScalesBendingOnly) {
    const FrameworkGraph g = build_preset("grid-diag");
    const CellMesh cm = build_cell_mesh(g, 8);
    const MicroSystem a(cm, g, defaults(0.3));
    const MicroSystem b(cm, g, defaults(0.6));
    const auto& ba = a.bending().matrix();
    const auto& bb = b.bending().matrix();
    EXPECT_LE(Eigen::SparseMatrix<double>(bb - 4.0 * ba).norm(), 1e-12 * bb.norm());
    EXPECT_EQ(Eigen::SparseMatrix<double>(a.area_stiffness().matrix() - b.area_stiffness().matrix()).norm(), 0.0);
    EXPECT_EQ(Eigen::SparseMatrix<double>(a.mass().matrix() - b.mass().matrix()).norm(), 0.0);
}

TEST(MicroAssembly, MismatchedMeshRejected) {
    const CellMesh cm = build_cell_mesh(build_preset("grid"), 8);
    EXPECT_THROW(MicroSystem(cm, build_preset("grid-diag"), defaults()), GeometryError);
}

TEST(MicroSpectrumTest, ResidualsOrthonormalityRayleigh) {
    const Fixture& f = fixture();
    ASSERT_EQ(f.sp.size(), 12);
    EXPECT_GT(f.sp.omega[0], 0.0);
    EXPECT_LE(f.sp.residuals.maxCoeff(), 1e-8);
    const Eigen::MatrixXd gram = f.sp.modes.transpose() * (f.sys.mass().matrix() * f.sp.modes);
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index i = 0; i < f.sp.size(); ++i) {
        EXPECT_NEAR(f.sys.stiffness().quad(f.sp.modes.col(i)), f.sp.omega[i], 1e-8 * f.sp.omega[i]);
        if (i > 0) EXPECT_GE(f.sp.omega[i], f.sp.omega[i - 1]);
    }
}

TEST(MicroSpectrumTest, ConstraintsHoldOnEveryMode) {
    const Fixture& f = fixture();
    const Eigen::MatrixXd full = f.sys.embedding() * f.sp.modes;
    const CellMesh& cm = f.sys.cell_mesh();
    for (Eigen::Index n = 0; n < full.cols(); ++n) {
        const double scale = full.col(n).cwiseAbs().maxCoeff();
        for (int v : cm.node_vertex) EXPECT_LE(full.col(n).segment<2>(2 * v).norm(), 1e-12 * scale);
        for (std::size_t l = 0; l < f.g.link_count(); ++l) {
            const auto& path = cm.link_paths[l];
            for (std::size_t k = 0; k < path.size(); ++k) {
                const Vec2 u = full.col(n).segment<2>(2 * path[k]);
                EXPECT_LE(std::abs(u.dot(f.g.tangent(l))), 1e-12 * scale);
                EXPECT_NEAR(full(f.sys.deflection_dof(l, k), n), u.dot(f.g.normal(l)), 1e-12 * scale);
            }
        }
    }
}

TEST(MicroSpectrumTest, SymmetricPairsAndAverages) {
    const Fixture& f = fixture();
    int pairs = 0, silent = 0;
    for (Eigen::Index i = 0; i < f.sp.size(); ++i) {
        if (f.sp.zero_average[i]) {
            ++silent;
            EXPECT_LE(f.sp.averages[i].norm(), 1e-6);
            continue;
        }
        // a mode with nonzero average has a partner of equal frequency
        const bool has_next = i + 1 < f.sp.size() && std::abs(f.sp.omega[i + 1] - f.sp.omega[i]) <= 0.01 * f.sp.omega[i];
        if (!has_next) continue;  // partner may lie past the computed range
        ASSERT_FALSE(f.sp.zero_average[i + 1]);
        const Eigen::Matrix2d w = f.sp.averages[i] * f.sp.averages[i].transpose() +
                                  f.sp.averages[i + 1] * f.sp.averages[i + 1].transpose();
        // the pair spans a rotation-invariant plane: sum of outer products is isotropic
        EXPECT_NEAR(w(0, 0), w(1, 1), 1e-6 * w.trace());
        EXPECT_NEAR(w(0, 1), 0.0, 1e-6 * w.trace());
        ++pairs;
        ++i;
    }
    EXPECT_GT(pairs, 0);
    EXPECT_GT(silent, 0);
}

TEST(MicroSpectrumTest, BesselBoundOnAverages) {
    const Fixture& f = fixture();
    Vec2 captured = Vec2::Zero();
    for (const Vec2& a : f.sp.averages) captured += a.cwiseAbs2();
    EXPECT_LE(captured.maxCoeff(), 1.0 + 1e-10);
}

TEST(MicroSpectrumTest, LinkReversalLeavesSpectrumUnchanged) {
    const FrameworkGraph g = build_preset("grid-diag");
    const MicroSystem a(build_cell_mesh(g, 8), g, defaults());
    const MicroSpectrum sa = solve_micro(a, 6);
    for (std::size_t l = 0; l < g.link_count(); ++l) {
        const FrameworkGraph r = g.with_reversed_link(l);
        const MicroSystem b(build_cell_mesh(r, 8), r, defaults());
        const MicroSpectrum sb = solve_micro(b, 6);
        for (int i = 0; i < 6; ++i) EXPECT_NEAR(sb.omega[i], sa.omega[i], 1e-10 * sa.omega[i]) << "link " << l;
    }
}

TEST(MicroSpectrumTest, ModeCountValidated) {
    EXPECT_THROW(solve_micro(fixture().sys, 0), NumericalError);
}
