#include "thinframe/materials.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace thinframe;

namespace {

Sym2 random_sym(std::mt19937& rng) {
    std::normal_distribution<double> n;
    Sym2 xi;
    xi << n(rng), 0.0, 0.0, n(rng);
    xi(0, 1) = xi(1, 0) = n(rng);
    return xi;
}

// (A^{-1} eta . eta)^{-1} from the 4x4 matrix of A acting on all of R^{2x2}.
double k1_full_inverse(double lame, double mu, const Eigen::Vector2d& tau) {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    // index (i,j) -> 2i + j
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    a(2 * i + j, 2 * k + l) = lame * (i == j) * (k == l) + mu * ((i == k) * (j == l) + (i == l) * (j == k));
    // restrict to symmetric matrices: basis e11, e22, (e12 + e21)/sqrt2
    Eigen::Matrix<double, 4, 3> b = Eigen::Matrix<double, 4, 3>::Zero();
    b(0, 0) = 1.0;
    b(3, 1) = 1.0;
    b(1, 2) = b(2, 2) = 1.0 / std::sqrt(2.0);
    const Eigen::Matrix3d as = b.transpose() * a * b;
    Eigen::Vector4d eta;
    eta << tau.x() * tau.x(), tau.x() * tau.y(), tau.y() * tau.x(), tau.y() * tau.y();
    const Eigen::Vector3d e = b.transpose() * eta;
    return 1.0 / e.dot(as.inverse() * e);
}

}  // namespace

TEST(ElasticTensorTest, ApplyExamples) {
    const ElasticTensor a(1.0, 1.0);
    EXPECT_TRUE(a.apply(Sym2::Identity()).isApprox(4.0 * Sym2::Identity(), 1e-15));
    EXPECT_TRUE(a.apply(Sym2::Zero()).isZero());
    Sym2 off;
    off << 0.0, 1.0, 1.0, 0.0;
    EXPECT_TRUE(ElasticTensor(0.0, 1.0).apply(off).isApprox(2.0 * off, 1e-15));
}

TEST(ElasticTensorTest, InvalidParameters) {
    EXPECT_THROW(ElasticTensor(1.0, 0.0), MaterialError);
    EXPECT_THROW(ElasticTensor(-2.0, 1.0), MaterialError);
}

TEST(ElasticTensorTest, CoercivityBound) {
    std::mt19937 rng(11);
    for (auto [lame, mu] : {std::pair{0.0, 0.1}, std::pair{1.0, 1.0}, std::pair{-0.5, 1.0}, std::pair{10.0, 0.3}}) {
        const ElasticTensor a(lame, mu);
        const double c = 2.0 * std::min(mu, lame + mu);
        for (int i = 0; i < 100; ++i) {
            Sym2 xi = random_sym(rng);
            xi /= xi.norm();
            EXPECT_GE(a.form(xi, xi), c - 1e-10);
        }
    }
}

TEST(Voigt, Examples) {
    EXPECT_TRUE(to_voigt(ElasticTensor(0.0, 1.0)).m.isApprox(Eigen::Matrix3d(Eigen::Vector3d(2, 2, 2).asDiagonal())));
    const ElasticTensor half(0.0, 0.5);
    EXPECT_NEAR(to_voigt(half).form(Sym2::Identity(), Sym2::Identity()), 2.0, 1e-15);
}

TEST(Voigt, FormEquivalenceAndRoundTrip) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int t = 0; t < 50; ++t) {
        const ElasticTensor a(u(rng) - 0.04, u(rng));
        const VoigtMatrix v = to_voigt(a);
        for (int i = 0; i < 10; ++i) {
            const Sym2 xi = random_sym(rng), zeta = random_sym(rng);
            EXPECT_NEAR(v.form(xi, zeta), a.form(xi, zeta), 1e-12 * (1.0 + std::abs(a.form(xi, zeta))));
        }
        const ElasticTensor back = from_voigt(v);
        EXPECT_NEAR(back.lame, a.lame, 1e-14 * (1.0 + std::abs(a.lame)));
        EXPECT_NEAR(back.shear, a.shear, 1e-14 * (1.0 + a.shear));
        const Sym2 xi = random_sym(rng);
        EXPECT_TRUE(from_voigt(to_voigt(xi)).isApprox(xi, 1e-15));
    }
}

TEST(K1, Examples) {
    const Eigen::Vector2d e1(1.0, 0.0), d(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    EXPECT_NEAR(k1(ElasticTensor(1.0, 1.0), e1), 8.0 / 3.0, 1e-13);
    EXPECT_NEAR(k1(ElasticTensor(0.0, 1.0), e1), 2.0, 1e-13);
    EXPECT_NEAR(k1(ElasticTensor(1.0, 1.0), e1), k1(ElasticTensor(1.0, 1.0), d), 1e-12);
    EXPECT_THROW(k1(ElasticTensor(1.0, 1.0), Eigen::Vector2d(1.0, 1.0)), MaterialError);
}

TEST(K1, ClosedFormAndFullInverseOverGrid) {
    const Eigen::Vector2d tau = Eigen::Vector2d(3.0, 4.0) / 5.0;
    for (int i = 1; i <= 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double mu = i, lame = j * 10.0 / 9.0;
            const double closed = 4.0 * mu * (lame + mu) / (lame + 2.0 * mu);
            const double value = k1(ElasticTensor(lame, mu), tau);
            EXPECT_NEAR(value, closed, 1e-12 * closed);
            EXPECT_NEAR(k1_full_inverse(lame, mu, tau), closed, 1e-11 * closed);
            EXPECT_NEAR(k1_isotropic(ElasticTensor(lame, mu)), closed, 1e-12 * closed);
        }
}
