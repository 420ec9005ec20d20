#include "thinframe/micro_spectral.hpp"

#include "thinframe/beam.hpp"
#include "thinframe/fem.hpp"
#include "thinframe/kernels.hpp"

#include <cmath>
#include <sstream>

namespace thinframe {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseSymmetric reduce(const Eigen::SparseMatrix<double>& e, const Eigen::SparseMatrix<double>& full) {
    Eigen::SparseMatrix<double> r = e.transpose() * full * e;
    Eigen::SparseMatrix<double> rt = r.transpose();
    return SparseSymmetric(Eigen::SparseMatrix<double>(0.5 * (r + rt)));
}

}  // namespace

MicroSystem::MicroSystem(const CellMesh& mesh, const FrameworkGraph& g, const MicroParameters& params)
    : mesh_(mesh), graph_(g), params_(params) {
    if (!(params.theta > 0.0)) throw GeometryError("theta must be positive");
    if (mesh.link_paths.size() != g.link_count() || mesh.node_vertex.size() != g.node_count())
        throw GeometryError("cell mesh was not built on this framework");

    const CrossMesh& cm = mesh.mesh;
    const Eigen::Index nv = static_cast<Eigen::Index>(cm.vertex_count());
    const std::size_t nl = g.link_count();
    const double total = g.total_length();

    Eigen::Index offset = 2 * nv;
    for (std::size_t l = 0; l < nl; ++l) {
        beam_offset_.push_back(offset);
        offset += 2 * static_cast<Eigen::Index>(mesh.link_paths[l].size());
    }
    const Eigen::Index nfull = offset;

    // Vertex roles.
    enum class Role { free, interior, node };
    std::vector<Role> role(nv, Role::free);
    std::vector<std::pair<std::size_t, std::size_t>> where(nv, {0, 0});
    std::vector<int> node_of(nv, -1);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        role[mesh.node_vertex[n]] = Role::node;
        node_of[mesh.node_vertex[n]] = static_cast<int>(n);
    }
    for (std::size_t l = 0; l < nl; ++l) {
        const auto& path = mesh.link_paths[l];
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            const int v = path[k];
            if (role[v] != Role::free) throw GeometryError("links share a mesh vertex away from nodes");
            role[v] = Role::interior;
            where[v] = {l, k};
        }
    }

    // Reduced numbering.
    std::vector<Eigen::Index> red_a(nv, -1), red_b(nv, -1);
    Eigen::Index nred = 0;
    for (Eigen::Index v = 0; v < nv; ++v) {
        switch (role[v]) {
            case Role::free:
            case Role::interior:
                red_a[v] = nred++;
                red_b[v] = nred++;
                break;
            case Role::node:
                red_a[v] = nred++;
                break;
        }
    }

    Triplets et;
    for (Eigen::Index v = 0; v < nv; ++v) {
        if (role[v] == Role::free) {
            et.emplace_back(2 * v, red_a[v], 1.0);
            et.emplace_back(2 * v + 1, red_b[v], 1.0);
        } else if (role[v] == Role::interior) {
            const auto [l, k] = where[v];
            const Vec2 nu = g.normal(l);
            if (nu.x() != 0.0) et.emplace_back(2 * v, red_a[v], nu.x());
            if (nu.y() != 0.0) et.emplace_back(2 * v + 1, red_a[v], nu.y());
            et.emplace_back(deflection_dof(l, k), red_a[v], 1.0);
            et.emplace_back(slope_dof(l, k), red_b[v], 1.0);
        }
    }
    for (std::size_t l = 0; l < nl; ++l) {
        const auto& path = mesh.link_paths[l];
        et.emplace_back(slope_dof(l, 0), red_a[path.front()], 1.0);
        et.emplace_back(slope_dof(l, path.size() - 1), red_a[path.back()], 1.0);
    }
    embed_.resize(nfull, nred);
    embed_.setFromTriplets(et.begin(), et.end());

    // Inclusion elasticity and area mass (weight 1/2) on every triangle.
    const Eigen::Matrix3d d0 = to_voigt(params.a0).m;
    const auto& tris = cm.triangles();
    auto area_dofs = [&](std::ptrdiff_t t) {
        std::array<int, 6> dofs;
        for (int i = 0; i < 3; ++i) {
            dofs[2 * i] = 2 * tris[t][i];
            dofs[2 * i + 1] = 2 * tris[t][i] + 1;
        }
        return dofs;
    };
    const Eigen::SparseMatrix<double> k_area = kernels::assemble<6>(
        nfull, static_cast<std::ptrdiff_t>(tris.size()), [&](std::ptrdiff_t t) {
            return kernels::ElementBlock<6>{fem::stiffness(cm.triangle_coords(t), d0, 0.5), area_dofs(t)};
        });
    const Eigen::SparseMatrix<double> m_area = kernels::assemble<6>(
        nfull, static_cast<std::ptrdiff_t>(tris.size()), [&](std::ptrdiff_t t) {
            return kernels::ElementBlock<6>{fem::mass(cm.triangle_coords(t), 0.5), area_dofs(t)};
        });

    // Link bending and line mass (weight 1/(2 L_tot)).
    const double theta2 = params.theta * params.theta;
    Triplets kb, ml;
    for (std::size_t l = 0; l < nl; ++l) {
        const double len = mesh.link_step[l];
        const double kcoef = theta2 * k1(params.a1, g.tangent(l)) / (6.0 * total);
        const Matrix4 ke = hermite_stiffness(len, kcoef);
        const Matrix4 me = hermite_mass(len, 0.5 / total);
        const Vec2 tau = g.tangent(l);
        const Eigen::Matrix2d tt = tau * tau.transpose();
        const auto& path = mesh.link_paths[l];
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            const std::array<Eigen::Index, 4> bd{deflection_dof(l, k), slope_dof(l, k), deflection_dof(l, k + 1),
                                                 slope_dof(l, k + 1)};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    kb.emplace_back(bd[i], bd[j], ke(i, j));
                    ml.emplace_back(bd[i], bd[j], me(i, j));
                }
            // Tangential trace of U, linear along the edge.
            const std::array<int, 2> ends{path[k], path[k + 1]};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double p1 = (a == b ? 2.0 : 1.0) * len / 6.0 * (0.5 / total);
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 2; ++c)
                            if (tt(r, c) != 0.0) ml.emplace_back(2 * ends[a] + r, 2 * ends[b] + c, p1 * tt(r, c));
                }
        }
    }
    Eigen::SparseMatrix<double> k_bend(nfull, nfull), m_line(nfull, nfull);
    k_bend.setFromTriplets(kb.begin(), kb.end());
    m_line.setFromTriplets(ml.begin(), ml.end());

    // Scale the reduced DOFs to unit mass diagonal. Deflections, slopes and
    // plane displacements differ by powers of the mesh size, and rounding in
    // K x alone would otherwise hold eigen residuals near 1e-7.
    {
        const Eigen::SparseMatrix<double> m_full = m_area + m_line;
        const Eigen::SparseMatrix<double> mr = embed_.transpose() * m_full * embed_;
        Eigen::VectorXd d = mr.diagonal();
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (!(d[i] > 0.0)) throw GeometryError("reduced DOF without mass");
            d[i] = 1.0 / std::sqrt(d[i]);
        }
        embed_ = embed_ * d.asDiagonal();
    }

    k_full_ = SparseSymmetric(Eigen::SparseMatrix<double>(k_area + k_bend));
    m_full_ = SparseSymmetric(Eigen::SparseMatrix<double>(m_area + m_line));
    k_area_ = reduce(embed_, k_area);
    k_bend_ = reduce(embed_, k_bend);
    k_ = reduce(embed_, k_full_.matrix());
    m_ = reduce(embed_, m_full_.matrix());

    avg_x_ = embed_.transpose() * (m_full_ * constant_field(Vec2(1, 0)));
    avg_y_ = embed_.transpose() * (m_full_ * constant_field(Vec2(0, 1)));
}

Eigen::VectorXd MicroSystem::constant_field(const Vec2& c) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(full_dofs());
    const Eigen::Index nv = static_cast<Eigen::Index>(mesh_.mesh.vertex_count());
    for (Eigen::Index v = 0; v < nv; ++v) {
        f[2 * v] = c.x();
        f[2 * v + 1] = c.y();
    }
    for (std::size_t l = 0; l < graph_.link_count(); ++l) {
        const double w = c.dot(graph_.normal(l));
        for (std::size_t k = 0; k < mesh_.link_paths[l].size(); ++k) f[deflection_dof(l, k)] = w;
    }
    return f;
}

Vec2 MicroSystem::average(const Eigen::VectorXd& reduced) const {
    return {kernels::dot(avg_x_, reduced), kernels::dot(avg_y_, reduced)};
}

Eigen::MatrixXd MicroSystem::nodal_fields(const Eigen::MatrixXd& reduced) const {
    const Eigen::Index nv = static_cast<Eigen::Index>(mesh_.mesh.vertex_count());
    const Eigen::MatrixXd full = embed_ * reduced;
    return full.topRows(2 * nv);
}

Vec2 MicroSystem::interpolate(const Eigen::MatrixXd& nodal, Eigen::Index col, const Vec2& y) const {
    const auto loc = mesh_.mesh.locate(y);
    const auto& tri = mesh_.mesh.triangles()[loc.triangle];
    Vec2 u = Vec2::Zero();
    for (int i = 0; i < 3; ++i) u += loc.bary[i] * Vec2(nodal(2 * tri[i], col), nodal(2 * tri[i] + 1, col));
    return u;
}

MicroSpectrum solve_micro(const MicroSystem& sys, int m) {
    if (m < 1) throw NumericalError("mode count must be at least 1");
    EigenOptions opts;
    opts.tol = 1e-8;
    const EigenResult er = smallest_eigpairs(sys.stiffness(), sys.mass(), m, opts);
    if (!er.converged) {
        std::ostringstream msg;
        msg << "micro eigensolver did not converge; residuals:";
        for (Eigen::Index i = 0; i < er.residuals.size(); ++i) msg << ' ' << er.residuals[i];
        throw NumericalError(msg.str());
    }
    MicroSpectrum out;
    out.omega = er.values;
    out.modes = er.vectors;
    out.residuals = er.residuals;
    for (Eigen::Index i = 0; i < er.values.size(); ++i) {
        const Vec2 a = sys.average(er.vectors.col(i));
        out.averages.push_back(a);
        // Modes are M-normalised, so the tolerance is relative to ||phi||_M = 1.
        out.zero_average.push_back(a.norm() <= kZeroAverageTol);
    }
    return out;
}

}  // namespace thinframe
