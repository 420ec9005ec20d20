#include "thinframe/macro_fem.hpp"

#include "thinframe/fem.hpp"
#include "thinframe/kernels.hpp"

namespace thinframe {

namespace {

Eigen::SparseMatrix<double> scalar_p1_mass(const CrossMesh& mesh) {
    const auto& tris = mesh.triangles();
    const auto n = static_cast<std::ptrdiff_t>(mesh.vertex_count());
    return kernels::assemble<3>(n, static_cast<std::ptrdiff_t>(tris.size()), [&](std::ptrdiff_t t) {
        const double a = mesh.triangle_area(t);
        Eigen::Matrix3d m = Eigen::Matrix3d::Constant(a / 12.0);
        m.diagonal().setConstant(a / 6.0);
        return kernels::ElementBlock<3>{m, {tris[t][0], tris[t][1], tris[t][2]}};
    });
}

}  // namespace

MacroSpace::MacroSpace(int n) : mesh_(n, 1.0, false), free_(mesh_.vertex_count(), -1) {
    for (std::size_t v = 0; v < mesh_.vertex_count(); ++v) {
        if (!mesh_.on_boundary(static_cast<int>(v))) {
            free_[v] = static_cast<Eigen::Index>(interior_.size());
            interior_.push_back(static_cast<int>(v));
        }
    }
    scalar_mass_ = SparseSymmetric(scalar_p1_mass(mesh_));
}

SparseSymmetric MacroSpace::stiffness(const VoigtMatrix& a) const {
    const auto& tris = mesh_.triangles();
    return SparseSymmetric(kernels::assemble<6>(dofs(), static_cast<std::ptrdiff_t>(tris.size()), [&](std::ptrdiff_t t) {
        kernels::ElementBlock<6> blk{fem::stiffness(mesh_.triangle_coords(t), a.m, 1.0), {}};
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 2; ++c) blk.dofs[2 * i + c] = static_cast<int>(dof(tris[t][i], c));
        return blk;
    }));
}

SparseSymmetric MacroSpace::mass(const Eigen::Matrix2d& coupling) const {
    const auto& tris = mesh_.triangles();
    return SparseSymmetric(kernels::assemble<6>(dofs(), static_cast<std::ptrdiff_t>(tris.size()), [&](std::ptrdiff_t t) {
        const double a = mesh_.triangle_area(t);
        kernels::ElementBlock<6> blk{fem::Matrix6::Zero(), {}};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double s = (i == j ? a / 6.0 : a / 12.0);
                blk.k.block<2, 2>(2 * i, 2 * j) = s * coupling;
            }
            for (int c = 0; c < 2; ++c) blk.dofs[2 * i + c] = static_cast<int>(dof(tris[t][i], c));
        }
        return blk;
    }));
}

Eigen::VectorXd MacroSpace::interpolate(const Field& f) const {
    Eigen::VectorXd out(2 * mesh_.vertex_count());
    for (std::size_t v = 0; v < mesh_.vertex_count(); ++v) out.segment<2>(2 * v) = f(mesh_.vertices()[v]);
    return out;
}

Eigen::VectorXd MacroSpace::restrict(const Eigen::VectorXd& nodal) const {
    Eigen::VectorXd out(dofs());
    for (std::size_t i = 0; i < interior_.size(); ++i) out.segment<2>(2 * i) = nodal.segment<2>(2 * interior_[i]);
    return out;
}

Eigen::VectorXd MacroSpace::extend(const Eigen::VectorXd& free) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * mesh_.vertex_count());
    for (std::size_t i = 0; i < interior_.size(); ++i) out.segment<2>(2 * interior_[i]) = free.segment<2>(2 * i);
    return out;
}

Vec2 MacroSpace::evaluate(const Eigen::VectorXd& nodal, const Vec2& x) const {
    const auto loc = mesh_.locate(x);
    const auto& tri = mesh_.triangles()[loc.triangle];
    Vec2 u = Vec2::Zero();
    for (int i = 0; i < 3; ++i) u += loc.bary[i] * nodal.segment<2>(2 * tri[i]);
    return u;
}

Eigen::VectorXd macro_spectrum(const MacroTensor& a, const MacroSpace& space, int k) {
    if (k < 0) throw NumericalError("macro eigenvalue count must be non-negative");
    if (!a.elliptic) throw NumericalError("A^hom not elliptic; supply --macro-spectrum or use grid-diag");
    if (k == 0) return Eigen::VectorXd(0);
    EigenOptions opts;
    opts.tol = 1e-8;
    const EigenResult r = smallest_eigpairs(space.stiffness(a.voigt), space.mass(), k, opts);
    if (!r.converged) throw NumericalError("macro eigensolver did not converge");
    return r.values;
}

}  // namespace thinframe
