#pragma once

#include "thinframe/geometry.hpp"
#include "thinframe/limit_spectrum.hpp"
#include "thinframe/macro_fem.hpp"
#include "thinframe/materials.hpp"
#include "thinframe/micro_spectral.hpp"
#include "thinframe/numerics.hpp"
#include "thinframe/quadratic_space.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace thinframe {

enum class BoundaryMode { plain, stiff };

BoundaryMode parse_boundary_mode(const std::string& s);
std::string to_string(BoundaryMode m);

struct EpsParameters {
    int cells = 4;        // 1 / eps
    double theta = 0.4;
    int n_fine = 0;       // per cell side; 0 picks the smallest resolving value (at least 8)
    BoundaryMode mode = BoundaryMode::plain;
    ElasticTensor a0;
    ElasticTensor a1;
};

/// Smallest even n_fine with rods of half-width h at least two triangle layers
/// wide on the crossed mesh.
int min_nfine(double h);

/// Weighted fine-scale problem on the unit square: cells of size eps with a
/// framework of rods of cell half-width h = theta eps, soft matrix scaled by
/// eps^2, and the measure weight w = 1/2 + chi/(2 |Q_1^h|) with |Q_1^h| the
/// stiff area as seen by the quadrature.
///
/// Quadratic triangles on the crossed mesh split along the rod boundary.
/// Every element is further divided into 8 x 8 sub-triangles, each tagged
/// stiff or soft by its centroid, and the element matrices are integrated
/// exactly over that division (this settles the elements at rod junctions,
/// where the boundary has corners). Cells repeat, so the element matrices are
/// built once per element of the cell pattern.
class EpsProblem {
public:
    EpsProblem(const FrameworkGraph& g, const EpsParameters& p);

    double eps() const { return 1.0 / cells_; }
    int cells() const { return cells_; }
    double half_width() const { return h_; }
    int n_fine() const { return n_fine_; }
    BoundaryMode mode() const { return mode_; }
    const QuadraticSpace& space() const { return space_; }

    /// Stiff-coefficient and soft-coefficient stiffness (soft not scaled by eps^2).
    /// stiffness() = stiff_part() + eps^2 soft_part().
    const SparseSymmetric& stiff_part() const { return k_stiff_; }
    const SparseSymmetric& soft_part() const { return k_soft_; }
    SparseSymmetric stiffness() const;
    const SparseSymmetric& mass() const { return m_free_; }
    /// Weighted mass over all nodes (boundary included).
    const SparseSymmetric& full_mass() const { return m_all_; }

    /// int_Omega w dx by the assembly quadrature.
    double total_measure() const { return total_measure_; }
    double stiff_area_discrete() const { return area_disc_; }
    double stiff_area_exact() const { return area_exact_; }
    /// int_T w dx over element e of space().
    double measure(std::size_t e) const;
    /// w at the 6 points of p2::quadrature_points() in element e.
    const std::array<double, 6>& point_weights(std::size_t e) const;

private:
    int cells_;
    double h_;
    int n_fine_;
    BoundaryMode mode_;
    QuadraticSpace space_;
    std::vector<double> measure_local_;
    std::vector<std::array<double, 6>> point_w_local_;
    double area_disc_ = 0.0, area_exact_ = 0.0, total_measure_ = 0.0;
    SparseSymmetric k_stiff_, k_soft_, m_free_, m_all_;
};

struct DirectSolution {
    Eigen::VectorXd u;           // all-node field
    double e_stiff = 0.0;        // stiff-coefficient energy
    double e_soft = 0.0;         // soft energy before the eps^2 factor
    double energy = 0.0;         // e_stiff + eps^2 e_soft
    double norm_w = 0.0;         // int |u|^2 w
    double work = 0.0;           // int f . u w
    double residual = 0.0;
};

/// (K + M) u = M f with f sampled at the nodes.
DirectSolution solve_source(const EpsProblem& p, const Field& f);

struct DirectSpectrum {
    Eigen::VectorXd omega;
    Eigen::VectorXd residuals;
};

DirectSpectrum solve_spectrum(const EpsProblem& p, int m);

/// Weighted L2 distance between u_eps and u0(x) + sum_n c_n(x) phi_n(x / eps).
double two_scale_distance(const EpsProblem& p, const Eigen::VectorXd& u_eps, const MacroSpace& macro,
                          const HomogenisedSolution& hom, const MicroSystem* micro, const MicroSpectrum* spectrum);

struct HausdorffResidual {
    double forward = 0.0;   // direct -> limit
    double backward = 0.0;  // limit (below the largest direct value) -> direct
};

HausdorffResidual hausdorff_residual(const std::vector<double>& direct, const std::vector<double>& limit);

}  // namespace thinframe
