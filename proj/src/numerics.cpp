#include "thinframe/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace thinframe {

SparseSymmetric::SparseSymmetric(Storage full, double tol) : a_(std::move(full)) {
    if (a_.rows() != a_.cols()) throw NumericalError("symmetric matrix must be square");
    a_.makeCompressed();
    const Storage diff = a_ - Storage(a_.transpose());
    double scale = 0.0;
    for (int k = 0; k < a_.outerSize(); ++k)
        for (Storage::InnerIterator it(a_, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Storage::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    if (worst > tol * std::max(scale, 1e-300)) throw NumericalError("matrix is not symmetric");
}

Eigen::VectorXd SparseSymmetric::operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y;
    kernels::symmetric_spmv(a_, x, y);
    return y;
}

double SparseSymmetric::quad(const Eigen::VectorXd& x) const { return kernels::dot(x, *this * x); }

SparseSymmetric operator+(const SparseSymmetric& a, const SparseSymmetric& b) {
    return SparseSymmetric(SparseSymmetric::Storage(a.a_ + b.a_));
}

SparseSymmetric SparseSymmetric::scaled(double c) const { return SparseSymmetric(Storage(c * a_)); }

SparseSymmetric SparseSymmetric::shifted(const SparseSymmetric& b, double sigma) const {
    if (sigma == 0.0) return *this;
    return SparseSymmetric(Storage(a_ - sigma * b.a_));
}

SymmetricFactor::SymmetricFactor(const SparseSymmetric& a) : a_(a) {
    ldlt_.compute(a_.lower());
    const Eigen::VectorXd d = ldlt_.vectorD();
    const auto inverse = ldlt_.permutationPinv();
    auto fail = [&](Eigen::Index i) {
        throw NumericalError("zero pivot in LDL^T factorisation at index " + std::to_string(inverse.indices()[i]));
    };
    if (ldlt_.info() != Eigen::Success) {
        // the factorisation stops at the first exactly zero pivot
        for (Eigen::Index i = 0; i < d.size(); ++i)
            if (d[i] == 0.0) fail(i);
        throw NumericalError("LDL^T factorisation failed");
    }
    const double dmax = d.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(std::abs(d[i]) > 1e-13 * dmax)) fail(i);
}

Eigen::VectorXd SymmetricFactor::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = ldlt_.solve(b);
    const Eigen::VectorXd r = b - a_ * x;
    x += ldlt_.solve(r);
    return x;
}

Eigen::Index SymmetricFactor::negative_pivots() const {
    return (ldlt_.vectorD().array() < 0.0).count();
}

std::unique_ptr<SymmetricFactor> factorize(const SparseSymmetric& a) { return std::make_unique<SymmetricFactor>(a); }

namespace {

Eigen::MatrixXd start_block(Eigen::Index n, int b) {
    std::mt19937_64 gen(0x5eed1234abcdULL);
    Eigen::MatrixXd w(n, b);
    for (int j = 0; j < b; ++j)
        for (Eigen::Index i = 0; i < n; ++i) w(i, j) = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
    return w;
}

double relative_residual(const SparseSymmetric& k, const SparseSymmetric& m, const Eigen::VectorXd& x, double w) {
    const Eigen::VectorXd kx = k * x;
    const Eigen::VectorXd r = kx - w * (m * x);
    const double nk = kx.norm();
    return nk > 0.0 ? r.norm() / nk : r.norm();
}

EigenResult dense_eigpairs(const SparseSymmetric& k, const SparseSymmetric& m, int count) {
    const Eigen::MatrixXd kd = Eigen::MatrixXd(k.matrix());
    const Eigen::MatrixXd md = Eigen::MatrixXd(m.matrix());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kd, md);
    if (es.info() != Eigen::Success) throw NumericalError("dense generalized eigensolver failed");
    EigenResult out;
    out.values = es.eigenvalues().head(count);
    out.vectors = es.eigenvectors().leftCols(count);
    out.residuals.resize(count);
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd x = out.vectors.col(i);
        // Fix the sign so the largest component is positive.
        Eigen::Index imax;
        x.cwiseAbs().maxCoeff(&imax);
        if (x[imax] < 0) out.vectors.col(i) = -x;
        out.residuals[i] = relative_residual(k, m, out.vectors.col(i), out.values[i]);
    }
    out.converged = true;
    return out;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd g(a.cols(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j) g.col(j) = kernels::columns_dot(a, b.col(j));
    return 0.5 * (g + g.transpose());
}

/// Subspace inverse iteration with Rayleigh-Ritz on the candidate vectors.
void polish(const SparseSymmetric& k, const SparseSymmetric& m, const SymmetricFactor& factor, int count,
            const EigenOptions& opts, EigenResult& out) {
    Eigen::MatrixXd x = out.vectors;
    const Eigen::Index p = x.cols();
    if (p < count) {
        out.converged = false;
        return;
    }
    for (int round = 0; round < 4; ++round) {
        Eigen::MatrixXd kx(x.rows(), p), mx(x.rows(), p);
        for (Eigen::Index j = 0; j < p; ++j) mx.col(j) = m * Eigen::VectorXd(x.col(j));
        for (Eigen::Index j = 0; j < p; ++j) x.col(j) = factor.solve(mx.col(j));
        for (Eigen::Index j = 0; j < p; ++j) {
            kx.col(j) = k * Eigen::VectorXd(x.col(j));
            mx.col(j) = m * Eigen::VectorXd(x.col(j));
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(x, kx), gram(x, mx));
        if (es.info() != Eigen::Success) break;
        x = x * es.eigenvectors();
        out.values = es.eigenvalues();
        out.vectors = x;
        out.residuals.resize(count);
        for (int i = 0; i < count; ++i) out.residuals[i] = relative_residual(k, m, x.col(i), out.values[i]);
        out.converged = (out.residuals.array() <= opts.tol).all();
        if (out.converged) break;
    }
    out.values = out.values.head(count).eval();
    out.vectors = out.vectors.leftCols(count).eval();
}

}  // namespace

EigenResult smallest_eigpairs(const SparseSymmetric& k, const SparseSymmetric& m, int count, const EigenOptions& opts) {
    const Eigen::Index n = k.dim();
    if (m.dim() != n) throw NumericalError("eigenproblem matrices differ in size");
    if (count < 0 || count >= n) throw NumericalError("requested eigenpair count must be below the dimension");
    if (count == 0) return EigenResult{Eigen::VectorXd(0), Eigen::MatrixXd(n, 0), Eigen::VectorXd(0), true, 0.0};
    if (n <= opts.dense_threshold) return dense_eigpairs(k, m, count);

    double sigma = opts.shift;
    std::unique_ptr<SymmetricFactor> factor;
    try {
        factor = factorize(k.shifted(m, sigma));
    } catch (const NumericalError&) {
        // K singular (or nearly): step slightly below zero.
        const double scale = k.matrix().diagonal().cwiseAbs().maxCoeff() /
                             std::max(m.matrix().diagonal().cwiseAbs().maxCoeff(), 1e-300);
        sigma = opts.shift - 1e-6 * scale;
        factor = factorize(k.shifted(m, sigma));
    }

    const int b = static_cast<int>(std::min<Eigen::Index>(opts.block, n));
    const Eigen::Index cap = std::min<Eigen::Index>(
        n, opts.max_basis > 0 ? opts.max_basis : std::max<Eigen::Index>(2 * count + 8 * b, 80));

    Eigen::MatrixXd v(n, cap), mv(n, cap);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cap, cap);
    Eigen::Index size = 0;   // basis vectors
    Eigen::Index known = 0;  // basis vectors whose operator image is projected

    auto append = [&](const Eigen::MatrixXd& w) {
        Eigen::Index added = 0;
        for (Eigen::Index j = 0; j < w.cols() && size < cap; ++j) {
            Eigen::VectorXd x = w.col(j);
            const double n0 = std::sqrt(std::max(kernels::dot(x, m * x), 0.0));
            if (!(n0 > 0.0)) continue;
            for (int pass = 0; pass < 2 && size > 0; ++pass) {
                const Eigen::VectorXd c = kernels::columns_dot(mv.leftCols(size), x);
                kernels::subtract_combination(v.leftCols(size), c, x);
            }
            Eigen::VectorXd mx = m * x;
            const double nrm = std::sqrt(std::max(kernels::dot(x, mx), 0.0));
            if (!(nrm > 1e-10 * n0)) continue;
            v.col(size) = x / nrm;
            mv.col(size) = mx / nrm;
            ++size;
            ++added;
        }
        return added;
    };

    append(start_block(n, b));

    // The Lanczos stage stops at a loose tolerance: orthogonalisation leaves
    // rounding noise in the high modes that only inverse iteration removes.
    const double inner_tol = std::max(opts.tol, 1e-6);
    EigenResult out;
    out.shift = sigma;
    int restarts = 0;
    int fresh = 1;
    while (true) {
        // Project the operator (K - sigma M)^{-1} M on the new vectors.
        const Eigen::Index fresh_lo = known;
        Eigen::MatrixXd images(n, size - fresh_lo);
        for (Eigen::Index j = fresh_lo; j < size; ++j) images.col(j - fresh_lo) = factor->solve(mv.col(j));
        for (Eigen::Index j = fresh_lo; j < size; ++j) {
            const Eigen::VectorXd col = kernels::columns_dot(mv.leftCols(size), images.col(j - fresh_lo));
            for (Eigen::Index i = 0; i < size; ++i) {
                if (i < fresh_lo || i >= j) {
                    h(i, j) = col[i];
                    h(j, i) = col[i];
                } else {
                    const double avg = 0.5 * (h(i, j) + col[i]);
                    h(i, j) = h(j, i) = avg;
                }
            }
        }
        known = size;

        // Rayleigh-Ritz.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(size, size));
        const Eigen::VectorXd theta = es.eigenvalues();
        const Eigen::MatrixXd y = es.eigenvectors();
        // Largest theta <-> smallest omega above the shift.
        std::vector<Eigen::Index> order(size);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c) {
            const bool pa = theta[a] > 0, pc = theta[c] > 0;
            if (pa != pc) return pa;
            return pa ? theta[a] > theta[c] : theta[a] > theta[c];
        });
        // Candidates: the wanted pairs plus one block of spare Ritz vectors,
        // which the polishing step below uses as a guard space.
        const int have = static_cast<int>(std::min<Eigen::Index>(count, size));
        const int spare = static_cast<int>(std::min<Eigen::Index>(count + b, size));
        Eigen::MatrixXd ysel(size, spare);
        Eigen::VectorXd omega(spare);
        for (int i = 0; i < spare; ++i) {
            ysel.col(i) = y.col(order[i]);
            omega[i] = sigma + 1.0 / theta[order[i]];
        }
        Eigen::MatrixXd x = v.leftCols(size) * ysel;
        Eigen::VectorXd res(have);
        for (int i = 0; i < have; ++i) res[i] = relative_residual(k, m, x.col(i), omega[i]);

        const bool exhausted = size >= n;
        if (have == count && ((res.array() <= inner_tol).all() || exhausted)) {
            out.converged = true;
            out.values = omega;
            out.vectors = x;
            out.residuals = res;
            break;
        }

        Eigen::MatrixXd next = images;
        if (size + b > cap) {
            // Continuation block: the new images with the whole current basis
            // removed, so the residuals of the kept Ritz vectors stay inside
            // the restarted space.
            for (Eigen::Index j = 0; j < next.cols(); ++j) {
                Eigen::VectorXd x = next.col(j);
                for (int pass = 0; pass < 2; ++pass) {
                    const Eigen::VectorXd c = kernels::columns_dot(mv.leftCols(size), x);
                    kernels::subtract_combination(v.leftCols(size), c, x);
                }
                next.col(j) = x;
            }
            if (++restarts > opts.max_restarts) {
                out.converged = false;
                out.values = omega;
                out.vectors = x;
                out.residuals = res;
                break;
            }
            const Eigen::Index keep = std::min<Eigen::Index>(size - b, std::max<Eigen::Index>(count + 2 * b, cap / 2));
            Eigen::MatrixXd ykeep(size, keep);
            for (Eigen::Index i = 0; i < keep; ++i) ykeep.col(i) = y.col(order[i]);
            const Eigen::MatrixXd vk = v.leftCols(size) * ykeep;
            const Eigen::MatrixXd mvk = mv.leftCols(size) * ykeep;
            v.leftCols(keep) = vk;
            mv.leftCols(keep) = mvk;
            h.setZero();
            for (Eigen::Index i = 0; i < keep; ++i) h(i, i) = theta[order[i]];
            size = known = keep;
        }

        Eigen::Index added = append(next);
        if (added == 0) {
            // Invariant subspace reached; continue with fresh directions.
            Eigen::MatrixXd w = start_block(n, b + fresh);
            added = append(w.rightCols(b));
            ++fresh;
            if (added == 0) {
                out.converged = (res.array() <= opts.tol).all();
                out.values = omega;
                out.vectors = x;
                out.residuals = res;
                break;
            }
        }
    }

    polish(k, m, *factor, count, opts, out);

    // Ascending order and a deterministic sign convention.
    std::vector<Eigen::Index> idx(out.values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index c) { return out.values[a] < out.values[c]; });
    EigenResult sorted = out;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        sorted.values[i] = out.values[idx[i]];
        sorted.residuals[i] = out.residuals[idx[i]];
        Eigen::VectorXd col = out.vectors.col(idx[i]);
        Eigen::Index imax;
        col.cwiseAbs().maxCoeff(&imax);
        sorted.vectors.col(i) = col[imax] < 0 ? Eigen::VectorXd(-col) : col;
    }
    return sorted;
}

}  // namespace thinframe
