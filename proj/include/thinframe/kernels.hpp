#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial reference in
// namespace `serial` producing bit-identical results: work is split into
// fixed chunks independent of the thread count and partial results are
// combined in chunk order.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <vector>

namespace thinframe::kernels {

using SparseMatrix = Eigen::SparseMatrix<double>;  // column-major

/// Fixed reduction chunk; part of the numerical result, do not tune per machine.
inline constexpr std::ptrdiff_t kChunk = 4096;

/// y = A x for a symmetric A in full column-major storage (y_i = column_i . x).
void symmetric_spmv(const SparseMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);

/// Chunked dot product.
double dot(Eigen::Ref<const Eigen::VectorXd> a, Eigen::Ref<const Eigen::VectorXd> b);

/// c = B^T x, one chunked dot per column of B.
Eigen::VectorXd columns_dot(Eigen::Ref<const Eigen::MatrixXd> b, Eigen::Ref<const Eigen::VectorXd> x);

/// x -= B c.
void subtract_combination(Eigen::Ref<const Eigen::MatrixXd> b, const Eigen::VectorXd& c, Eigen::Ref<Eigen::VectorXd> x);

/// Dense element matrix scattered into global rows/columns; negative
/// indices are dropped (eliminated DOFs).
template <int N>
struct ElementBlock {
    Eigen::Matrix<double, N, N> k;
    std::array<int, N> dofs;
};

/// Evaluates `element(e)` for every element in parallel into per-element
/// slots, then scatters serially in element order.
template <int N, class ElementFn>
SparseMatrix assemble(std::ptrdiff_t n_dofs, std::ptrdiff_t n_elements, ElementFn&& element) {
    std::vector<ElementBlock<N>> blocks(static_cast<std::size_t>(n_elements));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < n_elements; ++e) blocks[e] = element(e);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n_elements) * N * N);
    for (const auto& b : blocks)
        for (int i = 0; i < N; ++i) {
            if (b.dofs[i] < 0) continue;
            for (int j = 0; j < N; ++j)
                if (b.dofs[j] >= 0 && b.k(i, j) != 0.0) triplets.emplace_back(b.dofs[i], b.dofs[j], b.k(i, j));
        }
    SparseMatrix out(n_dofs, n_dofs);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

namespace serial {

void symmetric_spmv(const SparseMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
double dot(Eigen::Ref<const Eigen::VectorXd> a, Eigen::Ref<const Eigen::VectorXd> b);
Eigen::VectorXd columns_dot(Eigen::Ref<const Eigen::MatrixXd> b, Eigen::Ref<const Eigen::VectorXd> x);
void subtract_combination(Eigen::Ref<const Eigen::MatrixXd> b, const Eigen::VectorXd& c, Eigen::Ref<Eigen::VectorXd> x);

template <int N, class ElementFn>
SparseMatrix assemble(std::ptrdiff_t n_dofs, std::ptrdiff_t n_elements, ElementFn&& element) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n_elements) * N * N);
    for (std::ptrdiff_t e = 0; e < n_elements; ++e) {
        const ElementBlock<N> b = element(e);
        for (int i = 0; i < N; ++i) {
            if (b.dofs[i] < 0) continue;
            for (int j = 0; j < N; ++j)
                if (b.dofs[j] >= 0 && b.k(i, j) != 0.0) triplets.emplace_back(b.dofs[i], b.dofs[j], b.k(i, j));
        }
    }
    SparseMatrix out(n_dofs, n_dofs);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

}  // namespace serial

}  // namespace thinframe::kernels
