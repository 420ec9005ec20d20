#include "thinframe/limit_spectrum.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

using namespace thinframe;

namespace {

struct Limit {
    FrameworkGraph g = build_preset("grid-diag");
    MicroSystem sys{build_cell_mesh(g, 16), g, MicroParameters{ElasticTensor(0.0, 0.1), ElasticTensor(1.0, 1.0), 0.5}};
    MicroSpectrum sp = solve_micro(sys, 24);
    MacroTensor ahom = compute_ahom(g, ElasticTensor(1.0, 1.0));
    MacroSpace space{16};
    Eigen::VectorXd lambda = macro_spectrum(ahom, space, 8);
};

const Limit& limit() {
    static const Limit l;
    return l;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

BandStructure bands_with(int modes) {
    const BetaFunction bf(limit().sp, modes, true);
    return assemble_bands(bf, find_gammas(bf), to_vector(limit().lambda));
}

// Pair of modes at omega with averages sqrt(w) e1, sqrt(w) e2: weight w I.
void add_pair(std::vector<double>& omega, std::vector<Vec2>& avg, double om, double w) {
    omega.insert(omega.end(), {om, om});
    avg.emplace_back(std::sqrt(w), 0.0);
    avg.emplace_back(0.0, std::sqrt(w));
}

}  // namespace

TEST(Beta, ZeroAtOriginAndIsotropic) {
    const BetaFunction bf(limit().sp, 20, true);
    EXPECT_EQ(bf.matrix(0.0).norm(), 0.0);
    const std::vector<double> delta = bf.poles();
    ASSERT_FALSE(delta.empty());
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.5 * delta.back());
    int checked = 0;
    while (checked < 50) {
        const double s = u(rng);
        bool near_pole = false;
        for (double d : delta) near_pole = near_pole || std::abs(s - d) < 1e-3 * d;
        if (near_pole) continue;
        const Eigen::Matrix2d b = bf.matrix(s);
        const double scalar = 0.5 * b.trace();
        EXPECT_EQ(b(0, 1), b(1, 0));
        EXPECT_LE((b - scalar * Eigen::Matrix2d::Identity()).norm(), 1e-6 * std::abs(scalar)) << "s = " << s;
        ++checked;
    }
}

TEST(Beta, BlowsUpNextToFirstPole) {
    const BetaFunction bf(limit().sp, 20, true);
    const double d1 = bf.poles().front();
    EXPECT_GT(bf.scalar(d1 * (1.0 - 1e-6)), 1e4 * d1);
    EXPECT_LT(bf.scalar(d1 * (1.0 + 1e-6)), -1e4 * d1);
    EXPECT_THROW(bf.scalar(d1), NumericalError);
}

TEST(Beta, SyntheticSingleModeZero) {
    // one eigenvalue 1 whose averages give the scalar weight 1/2
    std::vector<double> omega;
    std::vector<Vec2> avg;
    add_pair(omega, avg, 1.0, 0.5);
    const BetaFunction bf(omega, avg, true);
    ASSERT_EQ(bf.poles().size(), 1u);
    EXPECT_NEAR(bf.scalar(0.5), 0.5 * (1.0 + 0.5 * 0.5 / 0.5), 1e-15);
    EXPECT_NEAR(solve_branch(bf, 1.0, 10.0, 0.0), 2.0, 1e-9);
}

TEST(Beta, SyntheticTwoPoleZero) {
    // 1 + s (w1 / (1 - s) + w2 / (4 - s)) vanishes at s = 2 for w2 = 2 w1 - 1
    std::vector<double> omega;
    std::vector<Vec2> avg;
    add_pair(omega, avg, 1.0, 0.6);
    add_pair(omega, avg, 4.0, 0.2);
    const BetaFunction bf(omega, avg, true);
    const std::vector<double> gamma = find_gammas(bf);
    ASSERT_EQ(gamma.size(), 2u);
    EXPECT_EQ(gamma[0], 0.0);
    EXPECT_NEAR(gamma[1], 2.0, 1e-9);
}

TEST(Beta, SilentModesAreNotPoles) {
    std::vector<double> omega;
    std::vector<Vec2> avg;
    add_pair(omega, avg, 1.0, 0.3);
    omega.push_back(2.0);
    avg.emplace_back(0.0, 0.0);
    add_pair(omega, avg, 3.0, 0.3);
    const BetaFunction bf(omega, avg, true);
    EXPECT_EQ(bf.poles(), (std::vector<double>{1.0, 3.0}));
    EXPECT_EQ(bf.silent(), (std::vector<double>{2.0}));
    EXPECT_NO_THROW(bf.scalar(2.0));
}

TEST(Beta, TailBoundFromBesselRemainder) {
    std::vector<double> omega;
    std::vector<Vec2> avg;
    add_pair(omega, avg, 2.0, 0.75);
    const BetaFunction bf(omega, avg, true);
    EXPECT_NEAR(bf.tail_bound(1.0), 1.0 * 0.25 / 1.0, 1e-15);
    EXPECT_TRUE(std::isinf(bf.tail_bound(2.5)));
}

namespace {

// First m with omega[m - 1] and omega[m] in one cluster, or 0.
int split_pair(const MicroSpectrum& sp) {
    for (int m = 1; m < sp.size(); ++m)
        if (std::abs(sp.omega[m] - sp.omega[m - 1]) <= kClusterTol * sp.omega[m - 1]) return m;
    return 0;
}

bool same_cluster(double a, double b) { return std::abs(a - b) <= kClusterTol * a; }

}  // namespace

TEST(Beta, SplitClusterIsCompleted) {
    const MicroSpectrum& sp = limit().sp;
    const int m = split_pair(sp);
    if (m == 0 || m + 1 >= sp.size()) GTEST_SKIP() << "no degenerate pair inside the computed range";
    const BetaFunction bf(sp, m, true);
    int end = m;
    while (end < sp.size() && same_cluster(sp.omega[m - 1], sp.omega[end])) ++end;
    EXPECT_EQ(bf.modes_used(), end);
    const Cluster& last = bf.clusters().back();
    EXPECT_GE(last.multiplicity, 2);
    EXPECT_TRUE(same_cluster(sp.omega[m - 1], last.omega)) << last.omega;
}

TEST(Beta, ClusterAtComputedEdgeIsDropped) {
    const MicroSpectrum& full = limit().sp;
    const int m = split_pair(full);
    if (m == 0) GTEST_SKIP() << "no degenerate pair in the computed range";
    // keep the spectrum only up to the second member of the pair, so the
    // cluster might continue past the computed modes
    MicroSpectrum sp;
    sp.omega = full.omega.head(m + 1);
    sp.modes = full.modes.leftCols(m + 1);
    sp.averages.assign(full.averages.begin(), full.averages.begin() + m + 1);
    sp.zero_average.assign(full.zero_average.begin(), full.zero_average.begin() + m + 1);
    sp.residuals = full.residuals.head(m + 1);
    int start = m - 1;
    while (start > 0 && same_cluster(sp.omega[start - 1], sp.omega[m])) --start;
    const BetaFunction bf(sp, m, true);
    EXPECT_EQ(bf.modes_used(), start);
    for (const Cluster& c : bf.clusters()) EXPECT_FALSE(same_cluster(sp.omega[m], c.omega)) << c.omega;
}

TEST(Bands, InterlacingAndGapsDisjoint) {
    const BandStructure bs = bands_with(20);
    ASSERT_GE(bs.gamma.size(), 2u);
    EXPECT_EQ(bs.gamma[0], 0.0);
    for (std::size_t n = 0; n < bs.delta.size(); ++n) {
        EXPECT_LT(bs.gamma[n], bs.delta[n]);
        if (n + 1 < bs.gamma.size()) EXPECT_LT(bs.delta[n], bs.gamma[n + 1]);
    }
    EXPECT_GT(bs.gaps.front().second - bs.gaps.front().first, 0.0);
    for (const auto& band : bs.bands) {
        EXPECT_LE(band.lo, band.hi);
        for (const auto& gap : bs.gaps) EXPECT_TRUE(band.hi <= gap.first || band.lo >= gap.second);
        EXPECT_TRUE(std::is_sorted(band.points.begin(), band.points.end()));
    }
    for (double a : bs.alpha)
        for (double d : bs.delta) EXPECT_NE(a, d);
}

TEST(Bands, ResolventConsistency) {
    const BetaFunction bf(limit().sp, 20, true);
    const BandStructure bs = assemble_bands(bf, find_gammas(bf), to_vector(limit().lambda));
    for (const auto& band : bs.bands)
        for (std::size_t k = 0; k < band.points.size(); ++k) {
            const double l = bs.lambda[k];
            EXPECT_LE(std::abs(bf.scalar(band.points[k]) - l), 1e-6 * l);
        }
    std::mt19937 rng(11);
    double spacing = bs.lambda.front();
    for (std::size_t k = 1; k < bs.lambda.size(); ++k)
        if (bs.lambda[k] > bs.lambda[k - 1]) spacing = std::min(spacing, bs.lambda[k] - bs.lambda[k - 1]);
    int tested = 0;
    for (const auto& gap : bs.gaps) {
        std::uniform_real_distribution<double> u(gap.first, gap.second);
        for (int i = 0; i < 5 && tested < 20; ++i) {
            const double s = u(rng);
            const double w = gap.second - gap.first;
            if (s - gap.first < 1e-6 * w || gap.second - s < 1e-6 * w) continue;
            const double b = bf.scalar(s);
            for (double l : bs.lambda) EXPECT_GT(std::abs(b - l), 1e-6 * spacing) << "s = " << s;
            ++tested;
        }
    }
    EXPECT_EQ(tested, 20);
}

TEST(Bands, TruncationStability) {
    const BandStructure a = bands_with(12), b = bands_with(20);
    for (std::size_t n = 0; n < a.gamma.size(); ++n) EXPECT_NEAR(b.gamma[n], a.gamma[n], 0.01 * a.gamma[n]);
    for (std::size_t n = 0; n < a.delta.size(); ++n) EXPECT_NEAR(b.delta[n], a.delta[n], 0.01 * a.delta[n]);
}

TEST(Bands, SkeletonSorted) {
    const std::vector<double> s = bands_with(20).skeleton();
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
}

TEST(MacroSpectrum, CountScalingAndEllipticity) {
    const Limit& l = limit();
    EXPECT_EQ(macro_spectrum(l.ahom, l.space, 0).size(), 0);
    EXPECT_THROW(macro_spectrum(l.ahom, l.space, -1), NumericalError);
    const MacroTensor doubled = MacroTensor::from(VoigtMatrix{2.0 * l.ahom.voigt.m});
    const Eigen::VectorXd twice = macro_spectrum(doubled, l.space, 8);
    EXPECT_LE((twice - 2.0 * l.lambda).cwiseAbs().maxCoeff(), 1e-8 * l.lambda.maxCoeff());
    const MacroTensor grid = compute_ahom(build_preset("grid"), ElasticTensor(1.0, 1.0));
    try {
        macro_spectrum(grid, l.space, 4);
        FAIL() << "non-elliptic tensor accepted";
    } catch (const NumericalError& e) {
        EXPECT_STREQ(e.what(), "A^hom not elliptic; supply --macro-spectrum or use grid-diag");
    }
}

TEST(MacroSpectrum, MatchesDensePencil) {
    const Limit& l = limit();
    const MacroSpace small(6);
    const Eigen::MatrixXd k = small.stiffness(l.ahom.voigt).matrix();
    const Eigen::MatrixXd m = small.mass().matrix();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd lam = macro_spectrum(l.ahom, small, 5);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(lam[i], es.eigenvalues()[i], 1e-9 * es.eigenvalues()[i]);
}

TEST(Homogenised, ZeroSourceGivesZero) {
    const Limit& l = limit();
    const HomogenisedSolution h =
        solve_homogenised(l.space, l.ahom, [](const Vec2&) { return Vec2::Zero(); }, &l.sys, &l.sp, 12);
    EXPECT_EQ(h.u0.norm(), 0.0);
    EXPECT_EQ(h.c.norm(), 0.0);
    EXPECT_EQ(h.energy, 0.0);
}

TEST(Homogenised, NoModesIsStandardProblem) {
    const Limit& l = limit();
    const Field f = [](const Vec2& x) { return Vec2(std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()), x.x() * (1 - x.x())); };
    const HomogenisedSolution h = solve_homogenised(l.space, l.ahom, f, nullptr, nullptr, 0);
    EXPECT_EQ(h.s.norm(), 0.0);
    const SparseSymmetric k = l.space.stiffness(l.ahom.voigt);
    const SparseSymmetric m = l.space.mass();
    const Eigen::VectorXd u = l.space.restrict(h.u0);
    // load built independently: free mass times the free part of f, plus the boundary coupling
    const Eigen::VectorXd fh = l.space.interpolate(f);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(u.size());
    const SparseSymmetric& ms = l.space.scalar_mass();
    for (int j = 0; j < ms.matrix().outerSize(); ++j)
        for (SparseSymmetric::Storage::InnerIterator it(ms.matrix(), j); it; ++it)
            for (int c = 0; c < 2; ++c) {
                const Eigen::Index d = l.space.dof(static_cast<int>(it.row()), c);
                if (d >= 0) load[d] += it.value() * fh[2 * it.col() + c];
            }
    EXPECT_LE((k * u + m * u - load).norm(), 1e-10 * load.norm());
    EXPECT_LE(h.residual, 1e-10);
}

TEST(Homogenised, TwelveModesResidualAndContraction) {
    const Limit& l = limit();
    std::mt19937 rng(23);
    std::normal_distribution<double> d;
    const double a = d(rng), b = d(rng), c = d(rng);
    const Field f = [=](const Vec2& x) {
        return Vec2(a * std::sin(M_PI * x.x()) * std::sin(2 * M_PI * x.y()) + b * x.y(),
                    c * std::cos(3 * x.x() + x.y()));
    };
    const HomogenisedSolution h = solve_homogenised(l.space, l.ahom, f, &l.sys, &l.sp, 12);
    EXPECT_LE(h.residual, 1e-8);
    EXPECT_EQ(h.s(0, 1), h.s(1, 0));
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h.s);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LT(es.eigenvalues().maxCoeff(), 1.0);
    EXPECT_GT(h.energy, 0.0);
    // Dirichlet values of u0 vanish
    const CrossMesh& mesh = l.space.mesh();
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        if (l.space.dof(static_cast<int>(v), 0) < 0) EXPECT_EQ(h.u0.segment<2>(2 * v).norm(), 0.0);
}

TEST(Homogenised, RejectsNonElliptic) {
    const Limit& l = limit();
    const MacroTensor grid = compute_ahom(build_preset("grid"), ElasticTensor(1.0, 1.0));
    EXPECT_THROW(solve_homogenised(l.space, grid, [](const Vec2&) { return Vec2(1.0, 0.0); }, nullptr, nullptr, 0), NumericalError);
}
