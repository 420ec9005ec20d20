#pragma once

#include "thinframe/cell_homog.hpp"
#include "thinframe/mesh.hpp"
#include "thinframe/numerics.hpp"

#include <Eigen/Core>

#include <functional>

namespace thinframe {

using Field = std::function<Vec2(const Vec2&)>;

/// Vector P1 space on the unit square, crossed mesh, homogeneous Dirichlet
/// condition. Free DOFs are (x, y) pairs of interior vertices.
class MacroSpace {
public:
    explicit MacroSpace(int n);

    const CrossMesh& mesh() const { return mesh_; }
    Eigen::Index dofs() const { return static_cast<Eigen::Index>(2 * interior_.size()); }
    /// Free DOF index of component c at vertex v, or -1 on the boundary.
    Eigen::Index dof(int v, int c) const { return free_[v] < 0 ? -1 : 2 * free_[v] + c; }

    /// int A e(u) . e(v) over the square.
    SparseSymmetric stiffness(const VoigtMatrix& a) const;
    /// int T u . v for a constant symmetric 2x2 coupling T.
    SparseSymmetric mass(const Eigen::Matrix2d& t = Eigen::Matrix2d::Identity()) const;
    /// Scalar P1 mass over all vertices (boundary included).
    const SparseSymmetric& scalar_mass() const { return scalar_mass_; }

    /// Nodal interpolant of f on all vertices, 2 values per vertex.
    Eigen::VectorXd interpolate(const Field& f) const;
    /// Restriction of an all-vertex nodal vector to the free DOFs and back.
    Eigen::VectorXd restrict(const Eigen::VectorXd& nodal) const;
    Eigen::VectorXd extend(const Eigen::VectorXd& free) const;

    /// Value at x of an all-vertex nodal field.
    Vec2 evaluate(const Eigen::VectorXd& nodal, const Vec2& x) const;

private:
    CrossMesh mesh_;
    std::vector<int> interior_;
    std::vector<Eigen::Index> free_;
    SparseSymmetric scalar_mass_;
};

/// Lowest k Dirichlet eigenvalues of u -> -div(A e(u)) on the unit square.
/// Refuses a non-elliptic tensor.
Eigen::VectorXd macro_spectrum(const MacroTensor& a, const MacroSpace& space, int k);

}  // namespace thinframe
