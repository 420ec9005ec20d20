#include "thinframe/kernels.hpp"

#include <algorithm>

namespace thinframe::kernels {

namespace {

std::ptrdiff_t chunk_count(std::ptrdiff_t n) { return (n + kChunk - 1) / kChunk; }

double chunk_dot(const double* a, const double* b, std::ptrdiff_t lo, std::ptrdiff_t hi) {
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
}

double column_dot(const SparseMatrix& a, std::ptrdiff_t col, const double* x) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) s += it.value() * x[it.row()];
    return s;
}

}  // namespace

void symmetric_spmv(const SparseMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const std::ptrdiff_t n = a.cols();
    y.resize(n);
    const double* xp = x.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = column_dot(a, i, xp);
}

double dot(Eigen::Ref<const Eigen::VectorXd> a, Eigen::Ref<const Eigen::VectorXd> b) {
    const std::ptrdiff_t n = a.size();
    const std::ptrdiff_t nc = chunk_count(n);
    std::vector<double> partial(static_cast<std::size_t>(nc));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nc; ++c)
        partial[c] = chunk_dot(a.data(), b.data(), c * kChunk, std::min(n, (c + 1) * kChunk));
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

Eigen::VectorXd columns_dot(Eigen::Ref<const Eigen::MatrixXd> b, Eigen::Ref<const Eigen::VectorXd> x) {
    const std::ptrdiff_t n = b.rows();
    const std::ptrdiff_t k = b.cols();
    const std::ptrdiff_t nc = chunk_count(n);
    Eigen::MatrixXd partial(nc, k);
#pragma omp parallel for schedule(static) collapse(2)
    for (std::ptrdiff_t j = 0; j < k; ++j)
        for (std::ptrdiff_t c = 0; c < nc; ++c)
            partial(c, j) = chunk_dot(b.col(j).data(), x.data(), c * kChunk, std::min(n, (c + 1) * kChunk));
    Eigen::VectorXd out(k);
    for (std::ptrdiff_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::ptrdiff_t c = 0; c < nc; ++c) s += partial(c, j);
        out[j] = s;
    }
    return out;
}

void subtract_combination(Eigen::Ref<const Eigen::MatrixXd> b, const Eigen::VectorXd& c, Eigen::Ref<Eigen::VectorXd> x) {
    const std::ptrdiff_t n = b.rows();
    const std::ptrdiff_t k = b.cols();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::ptrdiff_t j = 0; j < k; ++j) s += b(i, j) * c[j];
        x[i] -= s;
    }
}

namespace serial {

void symmetric_spmv(const SparseMatrix& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const std::ptrdiff_t n = a.cols();
    y.resize(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = column_dot(a, i, x.data());
}

double dot(Eigen::Ref<const Eigen::VectorXd> a, Eigen::Ref<const Eigen::VectorXd> b) {
    const std::ptrdiff_t n = a.size();
    double s = 0.0;
    for (std::ptrdiff_t c = 0; c < chunk_count(n); ++c)
        s += chunk_dot(a.data(), b.data(), c * kChunk, std::min(n, (c + 1) * kChunk));
    return s;
}

Eigen::VectorXd columns_dot(Eigen::Ref<const Eigen::MatrixXd> b, Eigen::Ref<const Eigen::VectorXd> x) {
    Eigen::VectorXd out(b.cols());
    for (std::ptrdiff_t j = 0; j < b.cols(); ++j) out[j] = serial::dot(b.col(j), x);
    return out;
}

void subtract_combination(Eigen::Ref<const Eigen::MatrixXd> b, const Eigen::VectorXd& c, Eigen::Ref<Eigen::VectorXd> x) {
    for (std::ptrdiff_t i = 0; i < b.rows(); ++i) {
        double s = 0.0;
        for (std::ptrdiff_t j = 0; j < b.cols(); ++j) s += b(i, j) * c[j];
        x[i] -= s;
    }
}

}  // namespace serial

}  // namespace thinframe::kernels
