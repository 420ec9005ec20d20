#pragma once

#include "thinframe/geometry.hpp"
#include "thinframe/materials.hpp"
#include "thinframe/mesh.hpp"
#include "thinframe/numerics.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace thinframe {

struct MicroParameters {
    ElasticTensor a0;
    ElasticTensor a1;
    double theta = 0.5;
};

/// Discretisation of the cell eigenproblem: bending of the network links
/// coupled to plane elasticity of the inclusions, with the composite mass
/// 1/2 dy + 1/2 dl / L_tot.
///
/// Full DOFs are vector P1 values at every cell-mesh vertex followed by one
/// Hermite (deflection, slope) pair per link-path vertex. Reduced DOFs
/// build in the constraints:
///  - off-network vertex: (U_x, U_y);
///  - interior link vertex: deflection w (U = w nu, beam w) and slope;
///  - graph node: U = 0, w = 0, one rotation shared by every incident
///    link-end slope.
/// Each reduced DOF is scaled so the reduced mass has unit diagonal.
class MicroSystem {
public:
    MicroSystem(const CellMesh& mesh, const FrameworkGraph& g, const MicroParameters& params);

    const SparseSymmetric& stiffness() const { return k_; }
    const SparseSymmetric& mass() const { return m_; }
    /// Reduced bending and inclusion parts of the stiffness.
    const SparseSymmetric& bending() const { return k_bend_; }
    const SparseSymmetric& area_stiffness() const { return k_area_; }

    const SparseSymmetric& full_mass() const { return m_full_; }
    const SparseSymmetric& full_stiffness() const { return k_full_; }
    /// Full <- reduced map (full column rank).
    const Eigen::SparseMatrix<double>& embedding() const { return embed_; }

    Eigen::Index full_dofs() const { return embed_.rows(); }
    Eigen::Index reduced_dofs() const { return embed_.cols(); }

    /// Full vector of the constant field c (beam deflections c.nu, slopes 0).
    Eigen::VectorXd constant_field(const Vec2& c) const;
    /// mu-average of a reduced field.
    Vec2 average(const Eigen::VectorXd& reduced) const;

    /// Nodal values (2 per mesh vertex) of reduced fields given as columns.
    Eigen::MatrixXd nodal_fields(const Eigen::MatrixXd& reduced) const;
    /// P1 interpolation of column `col` of nodal_fields() at cell point y.
    Vec2 interpolate(const Eigen::MatrixXd& nodal, Eigen::Index col, const Vec2& y) const;

    const CellMesh& cell_mesh() const { return mesh_; }
    const FrameworkGraph& graph() const { return graph_; }
    const MicroParameters& parameters() const { return params_; }

    /// Full index of the deflection of link `l` at path position `k`.
    Eigen::Index deflection_dof(std::size_t l, std::size_t k) const { return beam_offset_[l] + 2 * k; }
    Eigen::Index slope_dof(std::size_t l, std::size_t k) const { return beam_offset_[l] + 2 * k + 1; }

private:
    CellMesh mesh_;
    FrameworkGraph graph_;
    MicroParameters params_;
    std::vector<Eigen::Index> beam_offset_;
    Eigen::SparseMatrix<double> embed_;
    SparseSymmetric k_full_, m_full_;
    SparseSymmetric k_, m_, k_bend_, k_area_;
    Eigen::VectorXd avg_x_, avg_y_;  // reduced rows giving the mu-average
};

inline MicroSystem assemble_micro(const CellMesh& mesh, const FrameworkGraph& g, const MicroParameters& params) {
    return MicroSystem(mesh, g, params);
}

struct MicroSpectrum {
    Eigen::VectorXd omega;                 // ascending
    Eigen::MatrixXd modes;                 // reduced, M-orthonormal columns
    std::vector<Vec2> averages;            // mu-averages
    std::vector<bool> zero_average;
    Eigen::VectorXd residuals;

    Eigen::Index size() const { return omega.size(); }
};

/// Relative size of |<phi>| below which a mode counts as zero-average.
inline constexpr double kZeroAverageTol = 1e-6;

/// Lowest m eigenpairs. Throws NumericalError with the achieved residuals when
/// the eigensolver does not reach 1e-8.
MicroSpectrum solve_micro(const MicroSystem& sys, int m);

}  // namespace thinframe
