#include "thinframe/limit_spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace thinframe {

BetaFunction::BetaFunction(const MicroSpectrum& spectrum, int modes, bool isotropic) : isotropic_(isotropic) {
    const int available = static_cast<int>(spectrum.size());
    if (modes < 0 || modes > available) throw NumericalError("mode count exceeds the computed micro spectrum");
    int used = modes;
    auto same = [&](int i, int j) {
        return std::abs(spectrum.omega[j] - spectrum.omega[i]) <= kClusterTol * std::abs(spectrum.omega[i]);
    };
    if (used > 0 && used < available && same(used - 1, used)) {
        while (used < available && same(used - 1, used)) ++used;
        if (used == available) {
            // The cluster may continue past the computed modes: drop it.
            used = modes;
            while (used > 0 && same(used - 1, modes)) --used;
        }
    }
    std::vector<double> omega(spectrum.omega.data(), spectrum.omega.data() + used);
    std::vector<Vec2> avg(spectrum.averages.begin(), spectrum.averages.begin() + used);
    std::vector<bool> zero(spectrum.zero_average.begin(), spectrum.zero_average.begin() + used);
    build(omega, avg, zero);
}

BetaFunction::BetaFunction(const std::vector<double>& omega, const std::vector<Vec2>& averages, bool isotropic)
    : isotropic_(isotropic) {
    if (omega.size() != averages.size()) throw NumericalError("eigenvalue and average lists differ in length");
    std::vector<bool> zero;
    for (const auto& a : averages) zero.push_back(a.norm() <= kZeroAverageTol);
    build(omega, averages, zero);
}

void BetaFunction::build(const std::vector<double>& omega, const std::vector<Vec2>& averages,
                         const std::vector<bool>& zero) {
    used_ = static_cast<int>(omega.size());
    Eigen::Vector2d captured = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!(omega[i] > 0.0)) throw NumericalError("micro eigenvalues must be positive");
        if (i > 0 && omega[i] < omega[i - 1]) throw NumericalError("micro eigenvalues must be ascending");
        const bool joins = !clusters_.empty() &&
                           omega[i] - clusters_.back().omega <= kClusterTol * clusters_.back().omega;
        if (!joins) clusters_.push_back(Cluster{omega[i], 0, Eigen::Matrix2d::Zero(), true});
        Cluster& c = clusters_.back();
        ++c.multiplicity;
        c.weight += averages[i] * averages[i].transpose();
        c.silent = c.silent && zero[i];
        captured += averages[i].cwiseAbs2();
    }
    remainder_ = std::max(0.0, 1.0 - captured.minCoeff());
    last_omega_ = omega.empty() ? std::numeric_limits<double>::infinity() : omega.back();
}

Eigen::Matrix2d BetaFunction::matrix(double s) const {
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
    for (const auto& c : clusters_) {
        if (c.silent) continue;
        if (std::abs(s - c.omega) <= 1e-9 * std::max(1.0, c.omega)) {
            std::ostringstream msg;
            msg << "beta evaluated within 1e-9 of the pole " << c.omega;
            throw NumericalError(msg.str());
        }
        sum += c.weight / (c.omega - s);
    }
    return s * (Eigen::Matrix2d::Identity() + s * sum);
}

double BetaFunction::scalar(double s) const {
    const Eigen::Matrix2d b = matrix(s);
    const double value = 0.5 * b.trace();
    if (isotropic_) {
        const double dev = (b - value * Eigen::Matrix2d::Identity()).norm();
        if (dev > kIsotropyTol * std::max(std::abs(value), std::abs(s))) {
            std::ostringstream msg;
            msg << "beta is anisotropic at s = " << s << " on a symmetric framework (deviation " << dev << ")";
            throw NumericalError(msg.str());
        }
    }
    return value;
}

double BetaFunction::tail_bound(double s) const {
    if (s >= last_omega_) return std::numeric_limits<double>::infinity();
    return s * s * remainder_ / (last_omega_ - s);
}

std::vector<double> BetaFunction::poles() const {
    std::vector<double> out;
    for (const auto& c : clusters_)
        if (!c.silent) out.push_back(c.omega);
    return out;
}

std::vector<double> BetaFunction::silent() const {
    std::vector<double> out;
    for (const auto& c : clusters_)
        if (c.silent) out.push_back(c.omega);
    return out;
}

double solve_branch(const BetaFunction& bf, double lo, double hi, double target) {
    auto g = [&](double s) { return bf.scalar(s) - target; };
    const double width = hi - lo;
    const double guard = 2e-9 * std::max(1.0, std::abs(hi));
    double a = lo, b = hi;
    bool bracketed = false;
    for (double d = 1e-2 * width; d >= guard; d *= 1e-2) {
        a = lo + d;
        b = hi - d;
        if (g(a) < 0.0 && g(b) > 0.0) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed) {
        std::ostringstream msg;
        msg << "no sign change of b - " << target << " on (" << lo << ", " << hi << "); increase the mode count";
        throw NumericalError(msg.str());
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        (gm < 0.0 ? a : b) = mid;
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (a + b);
}

std::vector<double> find_gammas(const BetaFunction& bf) {
    const std::vector<double> delta = bf.poles();
    std::vector<double> gamma{0.0};
    for (std::size_t n = 0; n + 1 < delta.size(); ++n) gamma.push_back(solve_branch(bf, delta[n], delta[n + 1], 0.0));
    return gamma;
}

BandStructure assemble_bands(const BetaFunction& bf, const std::vector<double>& gammas,
                             const std::vector<double>& lambda) {
    BandStructure out;
    out.gamma = gammas;
    out.delta = bf.poles();
    out.alpha = bf.silent();
    out.lambda = lambda;
    std::sort(out.lambda.begin(), out.lambda.end());

    const std::size_t branches = std::min(out.gamma.size(), out.delta.size());
    for (std::size_t n = 0; n < branches; ++n) {
        const double lo = out.gamma[n], hi = out.delta[n];
        if (!(lo < hi)) throw NumericalError("zeros and poles of b do not interlace");
        // b must increase along the branch.
        double prev = -std::numeric_limits<double>::infinity();
        for (int k = 1; k < 100; ++k) {
            const double v = bf.scalar(lo + (hi - lo) * k / 100.0);
            if (!(v > prev)) throw NumericalError("b is not increasing on a band branch");
            prev = v;
        }
        Band band;
        band.branch = static_cast<int>(n) + 1;
        for (double l : out.lambda) {
            if (!(l > 0.0)) throw NumericalError("macro eigenvalues must be positive");
            band.points.push_back(solve_branch(bf, lo, hi, l));
        }
        if (!band.points.empty()) {
            band.lo = band.points.front();
            band.hi = hi;
            out.bands.push_back(std::move(band));
        }
    }
    for (std::size_t n = 0; n + 1 < out.gamma.size() && n < out.delta.size(); ++n) {
        if (!(out.delta[n] < out.gamma[n + 1])) throw NumericalError("zeros and poles of b do not interlace");
        out.gaps.emplace_back(out.delta[n], out.gamma[n + 1]);
    }
    return out;
}

std::vector<double> BandStructure::skeleton() const {
    std::vector<double> s(delta);
    s.insert(s.end(), alpha.begin(), alpha.end());
    for (const auto& b : bands) s.insert(s.end(), b.points.begin(), b.points.end());
    std::sort(s.begin(), s.end());
    return s;
}

namespace {

/// Applies the scalar mass to each component of an interleaved nodal field.
Eigen::VectorXd component_mass(const SparseSymmetric& ms, const Eigen::VectorXd& nodal) {
    const Eigen::Index nv = ms.dim();
    Eigen::VectorXd out(2 * nv);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd comp(nv);
        for (Eigen::Index v = 0; v < nv; ++v) comp[v] = nodal[2 * v + c];
        const Eigen::VectorXd mc = ms * comp;
        for (Eigen::Index v = 0; v < nv; ++v) out[2 * v + c] = mc[v];
    }
    return out;
}

/// a . u at every vertex.
Eigen::VectorXd project(const Eigen::VectorXd& nodal, const Vec2& a) {
    const Eigen::Index nv = nodal.size() / 2;
    Eigen::VectorXd out(nv);
    for (Eigen::Index v = 0; v < nv; ++v) out[v] = a.dot(nodal.segment<2>(2 * v));
    return out;
}

}  // namespace

HomogenisedSolution solve_homogenised(const MacroSpace& space, const MacroTensor& ahom, const Field& f,
                                      const MicroSystem* micro, const MicroSpectrum* spectrum, int modes) {
    if (!ahom.elliptic) throw NumericalError("A^hom not elliptic; supply --macro-spectrum or use grid-diag");
    if (modes < 0) throw NumericalError("mode count must be non-negative");
    if (modes > 0 && (micro == nullptr || spectrum == nullptr || modes > spectrum->size()))
        throw NumericalError("homogenised solve needs at least as many computed micro modes as requested");

    HomogenisedSolution out;
    out.modes = modes;
    std::vector<Vec2> a(modes);
    std::vector<double> omega(modes);
    for (int n = 0; n < modes; ++n) {
        a[n] = spectrum->averages[n];
        omega[n] = spectrum->omega[n];
        out.s += a[n] * a[n].transpose() / (1.0 + omega[n]);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(out.s);
    if (es.eigenvalues().minCoeff() < -1e-12 || es.eigenvalues().maxCoeff() >= 1.0)
        throw NumericalError("averaging operator S is not a contraction");

    const SparseSymmetric& ms = space.scalar_mass();
    const Eigen::VectorXd fh = space.interpolate(f);
    const Eigen::Matrix2d t = Eigen::Matrix2d::Identity() - out.s;
    const SparseSymmetric k = space.stiffness(ahom.voigt);
    Eigen::VectorXd tf(fh.size());
    for (Eigen::Index v = 0; v < fh.size() / 2; ++v) tf.segment<2>(2 * v) = t * fh.segment<2>(2 * v);
    const Eigen::VectorXd rhs = space.restrict(component_mass(ms, tf));
    const auto factor = factorize(k + space.mass(t));
    const Eigen::VectorXd u = factor->solve(rhs);
    out.u0 = space.extend(u);

    const Eigen::VectorXd diff = fh - out.u0;
    out.c.resize(ms.dim(), modes);
    for (int n = 0; n < modes; ++n) out.c.col(n) = project(diff, a[n]) / (1.0 + omega[n]);

    out.energy = k.quad(u);
    for (int n = 0; n < modes; ++n) out.energy += omega[n] * ms.quad(out.c.col(n));

    // Residual of the two-scale identity against macro test functions and
    // products of macro hat functions with the retained micro modes.
    Eigen::VectorXd mean_u = out.u0;
    for (int n = 0; n < modes; ++n)
        for (Eigen::Index v = 0; v < ms.dim(); ++v) mean_u.segment<2>(2 * v) += out.c(v, n) * a[n];
    const Eigen::VectorXd rhs0 = space.restrict(component_mass(ms, fh));
    const Eigen::VectorXd r0 = k * u + space.restrict(component_mass(ms, mean_u)) - rhs0;
    double num = r0.squaredNorm(), den = rhs0.squaredNorm();
    if (modes > 0) {
        const Eigen::MatrixXd phi = spectrum->modes.leftCols(modes);
        Eigen::MatrixXd kphi(phi.rows(), modes), mphi(phi.rows(), modes);
        for (int n = 0; n < modes; ++n) {
            kphi.col(n) = micro->stiffness() * Eigen::VectorXd(phi.col(n));
            mphi.col(n) = micro->mass() * Eigen::VectorXd(phi.col(n));
        }
        const Eigen::MatrixXd coupling = phi.transpose() * (kphi + mphi);
        Eigen::MatrixXd mc(ms.dim(), modes);
        for (int n = 0; n < modes; ++n) mc.col(n) = ms * Eigen::VectorXd(out.c.col(n));
        for (int m = 0; m < modes; ++m) {
            // Average of the micro test mode computed from the system itself.
            const Vec2 am = micro->average(phi.col(m));
            const Eigen::VectorXd load = ms * project(fh, am);
            const Eigen::VectorXd rm = mc * coupling.row(m).transpose() + ms * project(out.u0, am) - load;
            num += rm.squaredNorm();
            den += load.squaredNorm();
        }
    }
    out.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return out;
}

}  // namespace thinframe
