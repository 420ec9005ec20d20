#include "thinframe/direct_solver.hpp"

#include "thinframe/fem.hpp"
#include "thinframe/kernels.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace thinframe {

BoundaryMode parse_boundary_mode(const std::string& s) {
    if (s == "plain") return BoundaryMode::plain;
    if (s == "stiff") return BoundaryMode::stiff;
    throw std::invalid_argument("boundary mode must be 'plain' or 'stiff', got '" + s + "'");
}

std::string to_string(BoundaryMode m) { return m == BoundaryMode::plain ? "plain" : "stiff"; }

int min_nfine(double h) {
    // Crossed squares stack two triangle layers along each axis.
    int n = static_cast<int>(std::ceil(0.5 / h - 1e-9));
    if (n % 2) ++n;
    return std::max(n, 2);
}

namespace {

// The 8 x 8 split of a triangle, as barycentric vertex triples.
std::vector<std::array<Eigen::Vector3d, 3>> sub_triangles() {
    constexpr int s = 8;
    using Tri = std::array<Eigen::Vector3d, 3>;
    auto at = [](int i, int j) -> Eigen::Vector3d { return Eigen::Vector3d(s - i - j, i, j) / double(s); };
    std::vector<Tri> out;
    for (int j = 0; j < s; ++j)
        for (int i = 0; i + j < s; ++i) {
            out.push_back(Tri{at(i, j), at(i + 1, j), at(i, j + 1)});
            if (i + j < s - 1) out.push_back(Tri{at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    return out;
}

using Block12 = Eigen::Matrix<double, 12, 12>;

struct LocalTemplates {
    Block12 stiff, soft, edge, mass;
};

int resolve_nfine(const EpsParameters& p) {
    if (p.cells < 1) throw GeometryError("1/eps must be a positive integer");
    if (!(p.theta > 0.0)) throw GeometryError("theta must be positive");
    const double h = p.theta / p.cells;
    const int need = min_nfine(h);
    if (p.n_fine == 0) return std::max(need, 8);
    if (p.n_fine < 2 || p.n_fine % 2) throw GeometryError("n_fine must be even and at least 2");
    if (p.n_fine < need) {
        std::ostringstream msg;
        msg << "rods under-resolved: n_fine = " << p.n_fine << " gives fewer than 2 triangle layers across a rod of half-width "
            << h << "; need n_fine >= " << need;
        throw GeometryError(msg.str());
    }
    return p.n_fine;
}

}  // namespace

EpsProblem::EpsProblem(const FrameworkGraph& g, const EpsParameters& p)
    : cells_(p.cells), h_(p.theta / std::max(p.cells, 1)), n_fine_(resolve_nfine(p)), mode_(p.mode),
      space_(p.cells, n_fine_, [&g, h = h_](const Vec2& y) { return periodic_distance(g, y) - h; }) {
    const RodRegion region(g, h_);
    area_exact_ = stiff_area(region);

    const auto subs = sub_triangles();
    const auto& qp = p2::quadrature_points();
    const auto& qw = p2::quadrature_weights();
    const std::size_t local = space_.local_count();
    auto at = [](const std::array<Vec2, 3>& pts, const Eigen::Vector3d& b) {
        return Vec2(b[0] * pts[0] + b[1] * pts[1] + b[2] * pts[2]);
    };

    // Stiff share of every sub-triangle of the cell pattern, by its centroid;
    // centroids on the rod boundary count half, so mirror images agree.
    auto share = [&](const Vec2& y) {
        const double d = periodic_distance(g, y) - h_;
        return d < -1e-12 ? 1.0 : (d > 1e-12 ? 0.0 : 0.5);
    };
    std::vector<std::vector<double>> stiff(local);
    area_disc_ = 0.0;
    for (std::size_t l = 0; l < local; ++l) {
        const auto pts = space_.local_coords(l);
        const double sub_area = std::abs(fem::signed_area(pts)) / static_cast<double>(subs.size());
        stiff[l].resize(subs.size());
        for (std::size_t s = 0; s < subs.size(); ++s) {
            const Eigen::Vector3d c = (subs[s][0] + subs[s][1] + subs[s][2]) / 3.0;
            stiff[l][s] = share(at(pts, c));
            area_disc_ += stiff[l][s] * sub_area;
        }
    }
    if (!(area_disc_ > 0.0)) throw GeometryError("no sample point falls inside the rods");

    const Eigen::Matrix3d d1 = to_voigt(p.a1).m;
    const Eigen::Matrix3d d0 = to_voigt(p.a0).m;
    const double ws = 0.5 + 0.5 / area_disc_;  // measure weight inside the rods
    std::vector<LocalTemplates> tmpl(local);
    measure_local_.assign(local, 0.0);
    point_w_local_.assign(local, {});
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(local); ++li) {
        const auto l = static_cast<std::size_t>(li);
        const auto cell_pts = space_.local_coords(l);
        // matrices in the physical scale: a triangle of the unit square
        std::array<Vec2, 3> pts;
        for (int i = 0; i < 3; ++i) pts[i] = cell_pts[i] / cells_;
        const auto grad = p2::barycentric_gradients(pts);
        const double sub_area = std::abs(fem::signed_area(pts)) / static_cast<double>(subs.size());
        LocalTemplates& t = tmpl[l];
        t.stiff.setZero();
        t.soft.setZero();
        t.edge.setZero();
        t.mass.setZero();
        for (std::size_t s = 0; s < subs.size(); ++s) {
            const double chi = stiff[l][s];
            const double w = 0.5 + 0.5 * chi / area_disc_;
            for (int q = 0; q < 6; ++q) {
                const Eigen::Vector3d b = qp[q][0] * subs[s][0] + qp[q][1] * subs[s][1] + qp[q][2] * subs[s][2];
                const double dx = sub_area * qw[q];
                const p2::StrainMap e = p2::strain_map(b, grad);
                const Eigen::Matrix<double, 3, 12> d1e = d1 * e;
                if (chi > 0.0) t.stiff.noalias() += (dx * chi * ws) * e.transpose() * d1e;
                if (chi < 1.0) t.soft.noalias() += (dx * (1.0 - chi) * 0.5) * e.transpose() * (d0 * e);
                t.edge.noalias() += (dx * w) * e.transpose() * d1e;
                const p2::Shape n = p2::shape(b);
                for (int a = 0; a < 6; ++a)
                    for (int c = 0; c < 6; ++c) {
                        const double v = dx * w * n[a] * n[c];
                        t.mass(2 * a, 2 * c) += v;
                        t.mass(2 * a + 1, 2 * c + 1) += v;
                    }
            }
            measure_local_[l] += sub_area * w;
        }
        for (int q = 0; q < 6; ++q)
            point_w_local_[l][q] = 0.5 + 0.5 * share(at(cell_pts, qp[q])) / area_disc_;
    }

    const CrossMesh& mesh = space_.mesh();
    const int big = mesh.n();
    const auto ne = static_cast<std::ptrdiff_t>(space_.element_count());
    auto free_dofs = [&](std::ptrdiff_t t) {
        std::array<int, 12> d;
        const auto& e = space_.element(t);
        for (int i = 0; i < 6; ++i)
            for (int c = 0; c < 2; ++c) d[2 * i + c] = static_cast<int>(space_.dof(e[i], c));
        return d;
    };
    auto edge_cell = [&](std::ptrdiff_t t) {
        const std::size_t sq = space_.parent(t) / 4;
        const int bi = static_cast<int>(sq % big) / n_fine_;
        const int bj = static_cast<int>(sq / big) / n_fine_;
        return mode_ == BoundaryMode::stiff && (bi == 0 || bj == 0 || bi == cells_ - 1 || bj == cells_ - 1);
    };
    // Ring cells in stiff mode carry A1 everywhere.
    k_stiff_ = SparseSymmetric(kernels::assemble<12>(space_.dofs(), ne, [&](std::ptrdiff_t t) {
        const LocalTemplates& lt = tmpl[space_.local_index(t)];
        return kernels::ElementBlock<12>{edge_cell(t) ? lt.edge : lt.stiff, free_dofs(t)};
    }));
    k_soft_ = SparseSymmetric(kernels::assemble<12>(space_.dofs(), ne, [&](std::ptrdiff_t t) {
        const LocalTemplates& lt = tmpl[space_.local_index(t)];
        return kernels::ElementBlock<12>{edge_cell(t) ? Block12::Zero() : lt.soft, free_dofs(t)};
    }));
    m_free_ = SparseSymmetric(kernels::assemble<12>(space_.dofs(), ne, [&](std::ptrdiff_t t) {
        return kernels::ElementBlock<12>{tmpl[space_.local_index(t)].mass, free_dofs(t)};
    }));
    m_all_ = SparseSymmetric(kernels::assemble<12>(2 * static_cast<std::ptrdiff_t>(space_.node_count()), ne,
                                                   [&](std::ptrdiff_t t) {
                                                       std::array<int, 12> d;
                                                       const auto& e = space_.element(t);
                                                       for (int i = 0; i < 6; ++i)
                                                           for (int c = 0; c < 2; ++c) d[2 * i + c] = 2 * e[i] + c;
                                                       return kernels::ElementBlock<12>{
                                                           tmpl[space_.local_index(t)].mass, d};
                                                   }));

    total_measure_ = 0.0;
    for (std::ptrdiff_t t = 0; t < ne; ++t) total_measure_ += measure(t);
}

double EpsProblem::measure(std::size_t e) const { return measure_local_[space_.local_index(e)]; }

const std::array<double, 6>& EpsProblem::point_weights(std::size_t e) const {
    return point_w_local_[space_.local_index(e)];
}

SparseSymmetric EpsProblem::stiffness() const {
    const double e2 = eps() * eps();
    return k_stiff_ + k_soft_.scaled(e2);
}

DirectSolution solve_source(const EpsProblem& p, const Field& f) {
    const QuadraticSpace& space = p.space();
    const Eigen::VectorXd fh = space.interpolate(f);
    const Eigen::VectorXd rhs = space.restrict(p.full_mass() * fh);
    const SparseSymmetric a = p.stiffness() + p.mass();
    const auto factor = factorize(a);
    const Eigen::VectorXd u = factor->solve(rhs);

    DirectSolution out;
    out.u = space.extend(u);
    const double rn = rhs.norm();
    out.residual = rn > 0.0 ? (a * u - rhs).norm() / rn : (a * u).norm();
    out.e_stiff = p.stiff_part().quad(u);
    out.e_soft = p.soft_part().quad(u);
    out.energy = out.e_stiff + p.eps() * p.eps() * out.e_soft;
    out.norm_w = p.mass().quad(u);
    out.work = kernels::dot(fh, p.full_mass() * out.u);
    return out;
}

DirectSpectrum solve_spectrum(const EpsProblem& p, int m) {
    if (m < 1) throw NumericalError("mode count must be at least 1");
    EigenOptions opts;
    opts.tol = 1e-8;
    const EigenResult r = smallest_eigpairs(p.stiffness(), p.mass(), m, opts);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "direct eigensolver did not converge; residuals:";
        for (Eigen::Index i = 0; i < r.residuals.size(); ++i) msg << ' ' << r.residuals[i];
        throw NumericalError(msg.str());
    }
    return DirectSpectrum{r.values, r.residuals};
}

double two_scale_distance(const EpsProblem& p, const Eigen::VectorXd& u_eps, const MacroSpace& macro,
                          const HomogenisedSolution& hom, const MicroSystem* micro, const MicroSpectrum* spectrum) {
    const int modes = hom.modes;
    if (modes > 0 && (micro == nullptr || spectrum == nullptr))
        throw NumericalError("two-scale distance needs the micro reconstruction");
    const Eigen::MatrixXd phi =
        modes > 0 ? micro->nodal_fields(spectrum->modes.leftCols(modes)) : Eigen::MatrixXd();
    const QuadraticSpace& space = p.space();
    const auto& qp = p2::quadrature_points();
    const auto& qw = p2::quadrature_weights();
    const auto ne = static_cast<std::ptrdiff_t>(space.element_count());
    std::vector<double> per(static_cast<std::size_t>(ne));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < ne; ++t) {
        const auto pts = space.element_coords(t);
        const auto& w = p.point_weights(t);
        const double area = space.element_area(t);
        double s = 0.0;
        for (int q = 0; q < 6; ++q) {
            const Vec2 x = qp[q][0] * pts[0] + qp[q][1] * pts[1] + qp[q][2] * pts[2];
            Vec2 diff = space.evaluate(u_eps, static_cast<std::size_t>(t), qp[q]);
            const auto loc = macro.mesh().locate(x);
            const auto& mt = macro.mesh().triangles()[loc.triangle];
            for (int i = 0; i < 3; ++i) diff -= loc.bary[i] * hom.u0.segment<2>(2 * mt[i]);
            if (modes > 0) {
                const Vec2 y = x * static_cast<double>(p.cells());
                for (int n = 0; n < modes; ++n) {
                    double c = 0.0;
                    for (int i = 0; i < 3; ++i) c += loc.bary[i] * hom.c(mt[i], n);
                    diff -= c * micro->interpolate(phi, n, y);
                }
            }
            s += area * qw[q] * w[q] * diff.squaredNorm();
        }
        per[t] = s;
    }
    double total = 0.0;
    for (double v : per) total += v;
    return std::sqrt(total);
}

HausdorffResidual hausdorff_residual(const std::vector<double>& direct, const std::vector<double>& limit) {
    if (direct.empty() || limit.empty()) throw NumericalError("Hausdorff residual needs nonempty spectra");
    auto dist = [](double x, const std::vector<double>& set) {
        double d = std::numeric_limits<double>::infinity();
        for (double s : set) d = std::min(d, std::abs(x - s));
        return d;
    };
    HausdorffResidual r;
    for (double w : direct) r.forward = std::max(r.forward, dist(w, limit));
    const double top = *std::max_element(direct.begin(), direct.end());
    for (double s : limit)
        if (s <= top) r.backward = std::max(r.backward, dist(s, direct));
    return r;
}

}  // namespace thinframe
