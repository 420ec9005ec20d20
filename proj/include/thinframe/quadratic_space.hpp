#pragma once

#include "thinframe/macro_fem.hpp"
#include "thinframe/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <vector>

namespace thinframe {

namespace p2 {

using Shape = Eigen::Matrix<double, 6, 1>;
using StrainMap = Eigen::Matrix<double, 3, 12>;

/// Dunavant 6-point rule, exact for quartics: barycentric points and weights (sum 1).
const std::array<Eigen::Vector3d, 6>& quadrature_points();
const std::array<double, 6>& quadrature_weights();

/// Shape values at barycentric point b; order v0, v1, v2, m01, m12, m20.
Shape shape(const Eigen::Vector3d& b);

/// Gradients of the barycentric coordinates of triangle p (rows).
Eigen::Matrix<double, 3, 2> barycentric_gradients(const std::array<Vec2, 3>& p);

/// Voigt strain (e11, e22, sqrt2 e12) of the 12 nodal values (u0x, u0y, ...).
StrainMap strain_map(const Eigen::Vector3d& b, const Eigen::Matrix<double, 3, 2>& grad_lambda);

}  // namespace p2

/// Vector P2 space on the unit square with homogeneous Dirichlet condition.
///
/// The square holds cells x cells copies of an n x n crossed cell mesh.
/// Triangles crossed by the zero set of a periodic level function (given in
/// cell coordinates) are split along it: every mesh edge whose end values
/// have opposite signs gets a node at the root, and the triangle is cut into
/// two pieces, or into a triangle and a quad (split along its shorter
/// diagonal, or fanned from its centre when the diagonals are equal). End values within 0.05 of the cell spacing count as zero,
/// which keeps the pieces away from slivers. The split is computed once on
/// the cell and repeated, so elements with equal local_index() are
/// translates of each other.
class QuadraticSpace {
public:
    using Level = std::function<double(const Vec2&)>;

    QuadraticSpace(int cells, int n, const Level& level = {});

    int cells() const { return cells_; }
    int n() const { return n_; }
    /// Background crossed mesh of the square, cells * n per side.
    const CrossMesh& mesh() const { return mesh_; }

    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    bool on_boundary(int node) const { return free_[node] < 0; }

    std::size_t element_count() const { return elements_.size(); }
    /// Corners, then midpoints of edges 01, 12, 20.
    const std::array<int, 6>& element(std::size_t e) const { return elements_[e]; }
    std::array<Vec2, 3> element_coords(std::size_t e) const;
    double element_area(std::size_t e) const;
    /// Background triangle holding element e.
    std::size_t parent(std::size_t e) const { return parent_[e]; }

    std::size_t local_count() const { return pieces_.size(); }
    std::size_t local_index(std::size_t e) const { return local_[e]; }
    /// Corners of a cell-pattern element in cell coordinates [0, 1]^2.
    std::array<Vec2, 3> local_coords(std::size_t l) const;

    Eigen::Index dofs() const { return static_cast<Eigen::Index>(2 * interior_.size()); }
    Eigen::Index dof(int node, int c) const { return free_[node] < 0 ? -1 : 2 * free_[node] + c; }

    /// Nodal interpolant of f, 2 values per node.
    Eigen::VectorXd interpolate(const Field& f) const;
    Eigen::VectorXd restrict(const Eigen::VectorXd& nodal) const;
    Eigen::VectorXd extend(const Eigen::VectorXd& free) const;

    Vec2 evaluate(const Eigen::VectorXd& nodal, const Vec2& x) const;
    Vec2 evaluate(const Eigen::VectorXd& nodal, std::size_t e, const Eigen::Vector3d& bary) const;

private:
    // Element of the cell pattern: corners as barycentrics of the parent
    // background triangle, each corner a parent vertex (0..2), the cut
    // point of parent edge k -> k+1 (3 + k) or the centre of a cut quad (6).
    struct Piece {
        std::array<Eigen::Vector3d, 3> bary;
        std::array<int, 3> ref;
        Eigen::Matrix3d to_piece;  // parent barycentrics -> piece barycentrics
    };

    int cells_;
    int n_;
    CrossMesh mesh_;
    CrossMesh cell_mesh_;
    std::vector<std::vector<int>> pieces_of_;  // per cell-pattern background triangle
    std::vector<Piece> pieces_;
    std::vector<std::size_t> piece_parent_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<int, 6>> elements_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> local_;
    std::vector<std::size_t> first_of_;  // first element of each background triangle
    std::vector<int> interior_;
    std::vector<Eigen::Index> free_;
};

}  // namespace thinframe
