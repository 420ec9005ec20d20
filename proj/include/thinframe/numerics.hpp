#pragma once

#include "thinframe/kernels.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include <memory>
#include <stdexcept>
#include <vector>

namespace thinframe {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Symmetric sparse matrix. Both triangles are stored so that products can be
/// formed column-wise; `lower()` gives the triangle handed to factorisations.
class SparseSymmetric {
public:
    using Storage = Eigen::SparseMatrix<double>;

    SparseSymmetric() = default;
    /// Takes a full (both triangles) matrix; throws NumericalError if it is
    /// not symmetric to `tol` relative to its largest entry.
    explicit SparseSymmetric(Storage full, double tol = 1e-12);

    Eigen::Index dim() const { return a_.rows(); }
    const Storage& matrix() const { return a_; }
    Storage lower() const { return a_.triangularView<Eigen::Lower>(); }
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    double quad(const Eigen::VectorXd& x) const;

    friend SparseSymmetric operator+(const SparseSymmetric& a, const SparseSymmetric& b);
    SparseSymmetric scaled(double c) const;
    /// a - sigma b
    SparseSymmetric shifted(const SparseSymmetric& b, double sigma) const;

private:
    Storage a_;
};

/// LDL^T factorisation with AMD fill-reducing ordering (no pivoting, so
/// indefinite matrices factor as long as no pivot vanishes).
class SymmetricFactor {
public:
    /// Throws NumericalError naming the (original) index of a vanishing pivot.
    explicit SymmetricFactor(const SparseSymmetric& a);
    SymmetricFactor(const SymmetricFactor&) = delete;
    SymmetricFactor& operator=(const SymmetricFactor&) = delete;

    /// Solve with one step of iterative refinement.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::Index dim() const { return a_.dim(); }
    /// Number of negative pivots (inertia of the matrix).
    Eigen::Index negative_pivots() const;

private:
    SparseSymmetric a_;
    Eigen::SimplicialLDLT<SparseSymmetric::Storage, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

std::unique_ptr<SymmetricFactor> factorize(const SparseSymmetric& a);

struct EigenOptions {
    double tol = 1e-8;
    double shift = 0.0;
    int block = 4;
    int max_basis = 0;        // 0: chosen from the requested count
    int max_restarts = 40;
    Eigen::Index dense_threshold = 64;
};

struct EigenResult {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // M-orthonormal columns
    Eigen::VectorXd residuals;  // ||K x - w M x|| / ||K x||
    bool converged = false;
    double shift = 0.0;
};

/// Lowest `m` eigenpairs of K x = w M x (K positive semidefinite, M positive
/// definite) by shift-invert block Lanczos with full reorthogonalisation.
/// Falls back to a small negative shift when K - shift M does not factor.
/// Deterministic: fixed start block, fixed reduction order.
EigenResult smallest_eigpairs(const SparseSymmetric& k, const SparseSymmetric& m, int count,
                              const EigenOptions& opts = {});

}  // namespace thinframe
