#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>

#include "lmqn/errors.hpp"
#include "lmqn/matrix.hpp"

namespace lmqn {

enum class RankKind { FullRank, IllConditioned, Deficient };

struct RankStatus {
    RankKind kind = RankKind::FullRank;
    double ratio = 1.0;    // min |r_ii| / max |r_ii|
    std::size_t index = 0; // offending column when Deficient

    explicit operator bool() const { return kind == RankKind::FullRank; }
};

/// Classifies the triangular factor by its diagonal: FullRank when the
/// smallest diagonal magnitude clears 1e-8 of the largest, Deficient when a
/// diagonal entry vanishes to working precision, IllConditioned in between.
inline RankStatus rank_status(const Matrix& r) {
    const std::size_t l = r.rows();
    if (l == 0) return RankStatus{RankKind::FullRank, 1.0, 0};
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < l; ++i) {
        const double d = std::abs(r(i, i));
        if (d > dmax) dmax = d;
        if (d < dmin) {
            dmin = d;
            argmin = i;
        }
    }
    if (dmax == 0.0) return RankStatus{RankKind::Deficient, 0.0, argmin};
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < l; ++i) {
        const double d = std::abs(r(i, i));
        if (d == 0.0 || d < eps * dmax * static_cast<double>(l))
            return RankStatus{RankKind::Deficient, dmin / dmax, i};
    }
    const double ratio = dmin / dmax;
    if (ratio > 1e-8) return RankStatus{RankKind::FullRank, ratio, 0};
    return RankStatus{RankKind::IllConditioned, ratio, argmin};
}

namespace detail {

/// Flips row signs so every diagonal entry is nonnegative; the orthogonal
/// factor absorbs the signs.
inline void normalize_diag_signs(Matrix& r) {
    for (std::size_t i = 0; i < r.rows(); ++i)
        if (r(i, i) < 0.0)
            for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = -r(i, j);
}

inline const char* rank_word(RankKind k) {
    return k == RankKind::Deficient ? "deficient" : "ill-conditioned";
}

} // namespace detail

/// Maintains the l x l triangular factor R1 of a tall matrix under column
/// append at the right edge and column removal at the left edge.  Both
/// updates cost O(l^2) plus the O(n l) inner products the caller supplies.
class ThinQR {
public:
    ThinQR() : r_(0, 0) {}
    explicit ThinQR(Matrix r) : r_(std::move(r)) {
        if (r_.rows() != r_.cols()) throw DimensionError("ThinQR: factor not square");
    }

    std::size_t l() const { return r_.rows(); }
    const Matrix& r1() const { return r_; }
    RankStatus status() const { return rank_status(r_); }

    /// Appends column c of the tall matrix.  psi_hat is the tall matrix
    /// before the append (the one this factor currently represents).
    void append_column(const Matrix& psi_hat, const Vector& c) {
        if (psi_hat.cols() != l()) throw DimensionError("append_column: factor lags matrix");
        if (l() == 0) {
            append_column_precomputed(Vector{}, norm2_sq(c));
            return;
        }
        if (psi_hat.rows() != c.size())
            throw DimensionError("append_column: column length differs");
        append_column_precomputed(multiply_transposed(psi_hat, c), norm2_sq(c));
    }

    /// Same update with Psi'c and ||c||^2 already formed by the caller.
    /// Solves R1'u = Psi'c, then eta^2 = ||c||^2 - ||u||^2 is the new
    /// diagonal entry squared.
    void append_column_precomputed(const Vector& psihat_t_c, double c_norm_sq) {
        const std::size_t lc = l();
        if (psihat_t_c.size() != lc)
            throw DimensionError("append_column: product length differs");
        if (!(c_norm_sq >= 0.0))
            throw NumericalError("append_column: negative column norm");

        Vector u = lc ? solve_upper_transposed(r_, psihat_t_c) : Vector{};
        const double res = c_norm_sq - norm2_sq(u);
        if (res < -1e-8 * c_norm_sq)
            throw NumericalError("append_column: residual norm lost to cancellation");
        const double eta = std::sqrt(std::max(0.0, res));

        Matrix grown(lc + 1, lc + 1);
        for (std::size_t i = 0; i < lc; ++i) {
            for (std::size_t j = 0; j < lc; ++j) grown(i, j) = r_(i, j);
            grown(i, lc) = u[i];
        }
        grown(lc, lc) = eta;

        const RankStatus st = rank_status(grown);
        if (!st) {
            std::ostringstream msg;
            msg << "append_column: factor " << detail::rank_word(st.kind)
                << " (diag ratio " << st.ratio << ")";
            throw RankError(msg.str());
        }
        r_ = std::move(grown);
    }

    /// Removes the leading `count` columns (one evicted pair: 2 for the
    /// convex class, 1 for SR1).  The shifted factor has lower bandwidth
    /// `count`; adjacent-row Givens rotations restore the triangle, column
    /// by column, eliminating each column bottom-up.
    void delete_leading_columns(std::size_t count) {
        if (count != 1 && count != 2)
            throw Error("delete_leading_columns: count must be 1 or 2");
        const std::size_t lc = l();
        if (count > lc) throw DimensionError("delete_leading_columns: factor too small");
        const std::size_t lnew = lc - count;

        Matrix w(lc, lnew);
        for (std::size_t i = 0; i < lc; ++i)
            for (std::size_t t = 0; t < lnew; ++t) w(i, t) = r_(i, t + count);

        for (std::size_t t = 0; t < lnew; ++t) {
            const std::size_t bottom = std::min(t + count, lc - 1);
            for (std::size_t r = bottom; r > t; --r) {
                const double a = w(r - 1, t);
                const double b = w(r, t);
                if (b == 0.0) continue;
                const double h = std::hypot(a, b);
                const double cs = a / h, sn = b / h;
                for (std::size_t j = t; j < lnew; ++j) {
                    const double wi = w(r - 1, j);
                    const double wj = w(r, j);
                    w(r - 1, j) = cs * wi + sn * wj;
                    w(r, j) = -sn * wi + cs * wj;
                }
            }
        }

        Matrix shrunk(lnew, lnew);
        for (std::size_t i = 0; i < lnew; ++i)
            for (std::size_t j = 0; j < lnew; ++j)
                shrunk(i, j) = (j >= i) ? w(i, j) : 0.0;
        detail::normalize_diag_signs(shrunk);
        r_ = std::move(shrunk);
    }

private:
    Matrix r_;
};

/// Householder QR of a tall matrix, keeping only the triangular factor.
inline ThinQR qr_from_scratch(const Matrix& a) {
    const std::size_t n = a.rows();
    const std::size_t l = a.cols();
    if (l > n) throw DimensionError("qr_from_scratch: more columns than rows");
    Matrix w = a;
    for (std::size_t k = 0; k < l; ++k) {
        double colnorm = 0.0;
        for (std::size_t i = k; i < n; ++i) colnorm += w(i, k) * w(i, k);
        colnorm = std::sqrt(colnorm);
        if (colnorm == 0.0) continue;

        const double alpha = (w(k, k) > 0.0) ? -colnorm : colnorm;
        Vector v(n - k);
        for (std::size_t i = k; i < n; ++i) v[i - k] = w(i, k);
        v[0] -= alpha;
        const double vtv = norm2_sq(v);
        if (vtv == 0.0) continue;

        for (std::size_t j = k; j < l; ++j) {
            double prod = 0.0;
            for (std::size_t i = k; i < n; ++i) prod += v[i - k] * w(i, j);
            const double scale = 2.0 * prod / vtv;
            for (std::size_t i = k; i < n; ++i) w(i, j) -= scale * v[i - k];
        }
        w(k, k) = alpha;
    }

    Matrix r(l, l);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) r(i, j) = (j >= i) ? w(i, j) : 0.0;
    detail::normalize_diag_signs(r);
    return ThinQR(std::move(r));
}

} // namespace lmqn
