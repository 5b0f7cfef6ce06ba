#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "lmqn/errors.hpp"
#include "lmqn/matrix.hpp"

namespace lmqn {

/// Bunch-Kaufman LDL' factorization of a symmetric (possibly indefinite)
/// matrix with partial pivoting: P A P' = L D L', D block diagonal with
/// 1x1 and 2x2 blocks, L unit lower triangular.  Intended for the small
/// inner matrices of compact forms (order <= a few dozen).
class SymIndefFactor {
public:
    explicit SymIndefFactor(const Matrix& a) {
        const std::size_t n = a.rows();
        if (a.cols() != n) throw DimensionError("SymIndefFactor: matrix not square");
        n_ = n;
        w_ = a;
        symmetrize(w_);
        scale_ = max_abs(w_);
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        pivot2_.assign(n, false);
        min_pivot_ = std::numeric_limits<double>::infinity();
        factorize();
    }

    std::size_t order() const { return n_; }

    /// Magnitude of the smallest pivot seen (for a 2x2 block, the smaller
    /// absolute eigenvalue of the block).
    double min_pivot() const { return min_pivot_; }

    /// True when some pivot fell below n*eps*max|A|, i.e. A is singular to
    /// working precision.
    bool near_singular() const {
        return min_pivot_ <= static_cast<double>(n_) *
                                 std::numeric_limits<double>::epsilon() * scale_;
    }

    Vector solve(const Vector& b) const {
        if (b.size() != n_) throw DimensionError("SymIndefFactor::solve: size differs");
        if (near_singular())
            throw SingularMError("SymIndefFactor: matrix singular to working precision",
                                 min_pivot_);
        Vector x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];

        // Lz = Pb, unit diagonal.  Inside a 2x2 block the subdiagonal entry
        // w_(j+1, j) belongs to D, not L, so that row is skipped.
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t first = pivot2_[j] ? j + 2 : j + 1;
            for (std::size_t i = first; i < n_; ++i) x[i] -= w_(i, j) * x[j];
        }

        // Block-diagonal solve.
        for (std::size_t k = 0; k < n_;) {
            if (pivot2_[k]) {
                const double a11 = w_(k, k), a21 = w_(k + 1, k), a22 = w_(k + 1, k + 1);
                const double det = a11 * a22 - a21 * a21;
                const double b1 = x[k], b2 = x[k + 1];
                x[k] = (a22 * b1 - a21 * b2) / det;
                x[k + 1] = (a11 * b2 - a21 * b1) / det;
                k += 2;
            } else {
                x[k] /= w_(k, k);
                k += 1;
            }
        }

        // L'u = z, with the same 2x2-block skip.
        for (std::size_t jj = n_; jj-- > 0;) {
            const std::size_t first = pivot2_[jj] ? jj + 2 : jj + 1;
            for (std::size_t i = first; i < n_; ++i) x[jj] -= w_(i, jj) * x[i];
        }

        Vector out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[perm_[i]] = x[i];
        return out;
    }

    /// Explicit inverse, symmetrized.
    Matrix inverse() const {
        Matrix inv(n_, n_);
        Vector e(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            e[j] = 1.0;
            Vector x = solve(e);
            e[j] = 0.0;
            for (std::size_t i = 0; i < n_; ++i) inv(i, j) = x[i];
        }
        symmetrize(inv);
        return inv;
    }

private:
    void swap_sym(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap(perm_[i], perm_[j]);
        for (std::size_t t = 0; t < n_; ++t) std::swap(w_(i, t), w_(j, t));
        for (std::size_t t = 0; t < n_; ++t) std::swap(w_(t, i), w_(t, j));
    }

    void note_pivot(double mag) { min_pivot_ = std::min(min_pivot_, mag); }

    void factorize() {
        static const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
        std::size_t k = 0;
        while (k < n_) {
            bool two_by_two = false;
            if (k + 1 < n_) {
                std::size_t r = k + 1;
                double lam = 0.0;
                for (std::size_t i = k + 1; i < n_; ++i)
                    if (std::abs(w_(i, k)) > lam) {
                        lam = std::abs(w_(i, k));
                        r = i;
                    }
                const double akk = std::abs(w_(k, k));
                if (lam > 0.0 && akk < alpha * lam) {
                    double sigma = 0.0;
                    for (std::size_t i = k; i < n_; ++i)
                        if (i != r) sigma = std::max(sigma, std::abs(w_(i, r)));
                    if (akk * sigma < alpha * lam * lam) {
                        if (std::abs(w_(r, r)) >= alpha * sigma) {
                            swap_sym(k, r);
                        } else {
                            swap_sym(k + 1, r);
                            two_by_two = true;
                        }
                    }
                }
            }

            if (!two_by_two) {
                const double d = w_(k, k);
                note_pivot(std::abs(d));
                Vector col(n_, 0.0);
                for (std::size_t i = k + 1; i < n_; ++i) col[i] = w_(i, k);
                for (std::size_t i = k + 1; i < n_; ++i) {
                    const double lik = (d != 0.0) ? col[i] / d : 0.0;
                    for (std::size_t j = k + 1; j <= i; ++j) {
                        const double v = w_(i, j) - lik * col[j];
                        w_(i, j) = v;
                        w_(j, i) = v;
                    }
                    w_(i, k) = lik; // L entry kept in place; (k,i) above is stale by design
                }
                k += 1;
            } else {
                const double a11 = w_(k, k), a21 = w_(k + 1, k), a22 = w_(k + 1, k + 1);
                const double det = a11 * a22 - a21 * a21;
                // smaller |eigenvalue| of the symmetric 2x2 block
                const double tr = a11 + a22;
                const double disc = std::sqrt(std::max(0.0, (a11 - a22) * (a11 - a22) + 4.0 * a21 * a21));
                const double e1 = 0.5 * (tr + disc), e2 = 0.5 * (tr - disc);
                note_pivot(std::min(std::abs(e1), std::abs(e2)));
                pivot2_[k] = true;
                Vector c1(n_, 0.0), c2(n_, 0.0);
                for (std::size_t i = k + 2; i < n_; ++i) {
                    c1[i] = w_(i, k);
                    c2[i] = w_(i, k + 1);
                }
                for (std::size_t i = k + 2; i < n_; ++i) {
                    const double l1 = (det != 0.0) ? (a22 * c1[i] - a21 * c2[i]) / det : 0.0;
                    const double l2 = (det != 0.0) ? (a11 * c2[i] - a21 * c1[i]) / det : 0.0;
                    for (std::size_t j = k + 2; j <= i; ++j) {
                        const double v = w_(i, j) - l1 * c1[j] - l2 * c2[j];
                        w_(i, j) = v;
                        w_(j, i) = v;
                    }
                    w_(i, k) = l1;
                    w_(i, k + 1) = l2;
                }
                k += 2;
            }
        }
    }

    std::size_t n_ = 0;
    Matrix w_;                      // L below diagonal, D blocks on diagonal
    std::vector<std::size_t> perm_; // perm_[i] = original index at position i
    std::vector<bool> pivot2_;      // true at first row of a 2x2 block
    double min_pivot_ = 0.0;
    double scale_ = 0.0;
};

/// Inverse of a symmetric indefinite matrix; throws SingularMError with the
/// offending pivot magnitude when singular to working precision.
inline Matrix sym_indef_inverse(const Matrix& a) {
    return SymIndefFactor(a).inverse();
}

} // namespace lmqn
