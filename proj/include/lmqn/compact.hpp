#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lmqn/errors.hpp"
#include "lmqn/family.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/pair_store.hpp"
#include "lmqn/sym_indef.hpp"

namespace lmqn {

/// Compact representation B = gamma*I + Psi * M * Psi'.  M is stored in
/// blocked column order: Psi = [gamma*S, Y] for the convex class and
/// Psi = Y - gamma*S for SR1.
struct CompactForm {
    UpdateFamily family;
    double gamma = 1.0;
    Matrix m; // l x l, symmetric

    std::size_t l() const { return m.rows(); }
};

/// Per-pair scalars produced by the convex-class recursion; lambda feeds the
/// closed-form inverse of M, sbs is s_j' B_{j-1} s_j.
struct BroydenDetail {
    Vector lambda;
    Vector sbs;
};

namespace detail {

inline void require_nonempty(const PairBuffer& buffer) {
    if (buffer.empty()) throw EmptyHistoryError("compact form requires at least one pair");
}

inline void require_gamma(double gamma) {
    if (!(gamma > 0.0)) throw PositivityError("gamma must be positive");
}

inline void require_curvature(const PairBuffer& buffer, const UpdateFamily& family) {
    const CurvatureCheck check = buffer.curvature_check(family);
    if (!check)
        throw CurvatureError("pair has nonpositive s'y", check.violating_index);
}

/// Explicit inverse of a small lower-triangular matrix.
inline Matrix lower_inverse(const Matrix& lbar) {
    const std::size_t q = lbar.rows();
    Matrix inv(q, q);
    Vector e(q, 0.0);
    for (std::size_t j = 0; j < q; ++j) {
        e[j] = 1.0;
        Vector x = solve_lower(lbar, e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < q; ++i) inv(i, j) = x[i];
    }
    return inv;
}

} // namespace detail

/// BFGS: M is the inverse of Gamma = -[[gamma*S'S, L], [L', -D]].
inline CompactForm build_bfgs(const PairBuffer& buffer, double gamma) {
    detail::require_nonempty(buffer);
    detail::require_gamma(gamma);
    detail::require_curvature(buffer, UpdateFamily::bfgs());

    const GramBlocks g = buffer.gram_blocks();
    const std::size_t q = buffer.size();
    Matrix gam(2 * q, 2 * q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            gam(i, j) = -gamma * g.StS(i, j);
            gam(i, q + j) = -g.L(i, j);
            gam(q + i, j) = -g.L(j, i);
            gam(q + i, q + j) = (i == j) ? g.D(i, i) : 0.0;
        }
    return CompactForm{UpdateFamily::bfgs(), gamma, sym_indef_inverse(gam)};
}

/// DFP: closed-form M from triangular solves with Lbar = L + D, never an
/// explicit inverse of the full inner matrix.
inline CompactForm build_dfp(const PairBuffer& buffer, double gamma) {
    detail::require_nonempty(buffer);
    detail::require_gamma(gamma);
    detail::require_curvature(buffer, UpdateFamily::dfp());

    const GramBlocks g = buffer.gram_blocks();
    const std::size_t q = buffer.size();
    const Matrix lbar = add(g.L, g.D);
    const Matrix linv = detail::lower_inverse(lbar);

    // C = Lbar^{-1} (D + gamma*S'S) Lbar^{-T}
    Matrix inner(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j)
            inner(i, j) = ((i == j) ? g.D(i, i) : 0.0) + gamma * g.StS(i, j);
    Matrix c = multiply(multiply(linv, inner), transpose(linv));
    symmetrize(c);

    Matrix m(2 * q, 2 * q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            m(i, j) = 0.0;
            m(i, q + j) = -linv(j, i); // -Lbar^{-T}
            m(q + i, j) = -linv(i, j); // -Lbar^{-1}
            m(q + i, q + j) = c(i, j);
        }
    return CompactForm{UpdateFamily::dfp(), gamma, std::move(m)};
}

/// SR1: Psi = Y - gamma*S and M = (D + L + L' - gamma*S'S)^{-1}.
inline CompactForm build_sr1(const PairBuffer& buffer, double gamma) {
    detail::require_nonempty(buffer);
    detail::require_gamma(gamma);

    const GramBlocks g = buffer.gram_blocks();
    const std::size_t q = buffer.size();
    Matrix inner(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const double lij = (i > j) ? g.L(i, j) : ((i < j) ? g.L(j, i) : 0.0);
            inner(i, j) = ((i == j) ? g.D(i, i) : 0.0) + lij - gamma * g.StS(i, j);
        }
    return CompactForm{UpdateFamily::sr1(), gamma, sym_indef_inverse(inner)};
}

/// Convex Broyden class, parameter phi in [0,1].  M is grown one pair at a
/// time: bordered update with the new pair's columns, then a symmetric index
/// permutation restores blocked order.  Never forms a matrix-matrix product.
inline CompactForm build_broyden(const PairBuffer& buffer, double gamma, double phi,
                                 BroydenDetail* out_detail = nullptr) {
    detail::require_nonempty(buffer);
    detail::require_gamma(gamma);
    const UpdateFamily family = UpdateFamily::broyden(phi);
    detail::require_curvature(buffer, family);

    const std::size_t q = buffer.size();
    const Matrix& sts = buffer.gram_ss();
    const Matrix& sty = buffer.gram_sy();
    Vector lambda(q), sbs_hist(q);

    const double sbs0 = gamma * sts(0, 0);
    const double sty0 = sty(0, 0);
    double alpha = -(1.0 - phi) / sbs0;
    double beta = -phi / sty0;
    double delta = (1.0 + phi * sbs0 / sty0) / sty0;
    lambda[0] = 1.0 / (alpha + beta);
    sbs_hist[0] = sbs0;

    Matrix m(2, 2);
    m(0, 0) = alpha;
    m(0, 1) = beta;
    m(1, 0) = beta;
    m(1, 1) = delta;

    for (std::size_t j = 1; j < q; ++j) {
        const std::size_t lcur = 2 * j;

        // v = Psi_{j-1}' s_j, assembled from the Gram caches
        Vector v(lcur);
        for (std::size_t i = 0; i < j; ++i) {
            v[i] = gamma * sts(i, j);
            v[j + i] = sty(j, i);
        }
        Vector p = multiply(m, v);
        const double sbs = gamma * sts(j, j) + dot(v, p);
        if (!(sbs > 0.0))
            throw PositivityError("convex-class recursion lost positive curvature");
        const double styj = sty(j, j);
        alpha = -(1.0 - phi) / sbs;
        beta = -phi / styj;
        delta = (1.0 + phi * sbs / styj) / styj;
        lambda[j] = 1.0 / (alpha + beta);
        sbs_hist[j] = sbs;

        // bordered M, new pair's columns last
        Matrix mhat(lcur + 2, lcur + 2);
        for (std::size_t r = 0; r < lcur; ++r)
            for (std::size_t c = 0; c < lcur; ++c)
                mhat(r, c) = m(r, c) + alpha * p[r] * p[c];
        for (std::size_t r = 0; r < lcur; ++r) {
            mhat(r, lcur) = alpha * p[r];
            mhat(lcur, r) = alpha * p[r];
            mhat(r, lcur + 1) = beta * p[r];
            mhat(lcur + 1, r) = beta * p[r];
        }
        mhat(lcur, lcur) = alpha;
        mhat(lcur, lcur + 1) = beta;
        mhat(lcur + 1, lcur) = beta;
        mhat(lcur + 1, lcur + 1) = delta;

        // sigma maps blocked position to bordered position
        std::vector<std::size_t> sigma(lcur + 2);
        for (std::size_t i = 0; i < j; ++i) sigma[i] = i;
        sigma[j] = 2 * j;
        for (std::size_t t = 0; t < j; ++t) sigma[j + 1 + t] = j + t;
        sigma[2 * j + 1] = 2 * j + 1;

        Matrix mnew(lcur + 2, lcur + 2);
        for (std::size_t r = 0; r < lcur + 2; ++r)
            for (std::size_t c = 0; c < lcur + 2; ++c)
                mnew(r, c) = mhat(sigma[r], sigma[c]);
        m = std::move(mnew);
    }

    symmetrize(m);
    if (out_detail) *out_detail = BroydenDetail{std::move(lambda), std::move(sbs_hist)};
    return CompactForm{family, gamma, std::move(m)};
}

/// Closed-form inverse of the convex-class M:
///   M^{-1} = [[-gamma*S'S + phi*Lam, -L + phi*Lam], [-L' + phi*Lam, D + phi*Lam]]
/// with Lam = diag(lambda_j) from the recursion.
inline Matrix broyden_m_inverse(const PairBuffer& buffer, double gamma, double phi) {
    BroydenDetail det;
    build_broyden(buffer, gamma, phi, &det);

    const GramBlocks g = buffer.gram_blocks();
    const std::size_t q = buffer.size();
    Matrix minv(2 * q, 2 * q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const double lam = (i == j) ? phi * det.lambda[i] : 0.0;
            minv(i, j) = -gamma * g.StS(i, j) + lam;
            minv(i, q + j) = -g.L(i, j) + lam;
            minv(q + i, j) = -g.L(j, i) + lam;
            minv(q + i, q + j) = ((i == j) ? g.D(i, i) : 0.0) + lam;
        }
    return minv;
}

/// Dispatch on family.
inline CompactForm build_compact(const UpdateFamily& family, const PairBuffer& buffer,
                                 double gamma) {
    switch (family.kind()) {
    case UpdateKind::Bfgs:
        return build_bfgs(buffer, gamma);
    case UpdateKind::Dfp:
        return build_dfp(buffer, gamma);
    case UpdateKind::Sr1:
        return build_sr1(buffer, gamma);
    case UpdateKind::Broyden:
        return build_broyden(buffer, gamma, family.phi());
    }
    throw Error("build_compact: unknown family");
}

/// Perfect-shuffle permutation for q pairs: position i of the shuffled
/// ordering [gamma*s_0, y_0, gamma*s_1, y_1, ...] holds blocked column p(i).
inline std::vector<std::size_t> shuffle_permutation(std::size_t q) {
    std::vector<std::size_t> p(2 * q);
    for (std::size_t i = 0; i < 2 * q; ++i)
        p[i] = (i % 2 == 0) ? i / 2 : q + (i - 1) / 2;
    return p;
}

/// Blocked Psi: [gamma*S, Y] for the convex class, Y - gamma*S for SR1.
inline Matrix assemble_psi(const UpdateFamily& family, const PairBuffer& buffer,
                           double gamma) {
    detail::require_nonempty(buffer);
    const std::size_t n = buffer.n();
    const std::size_t q = buffer.size();
    if (family.kind() == UpdateKind::Sr1) {
        Matrix psi(n, q);
        for (std::size_t j = 0; j < q; ++j) {
            const Pair& pr = buffer.pair(j);
            for (std::size_t i = 0; i < n; ++i) psi(i, j) = pr.y[i] - gamma * pr.s[i];
        }
        return psi;
    }
    Matrix psi(n, 2 * q);
    for (std::size_t j = 0; j < q; ++j) {
        const Pair& pr = buffer.pair(j);
        for (std::size_t i = 0; i < n; ++i) {
            psi(i, j) = gamma * pr.s[i];
            psi(i, q + j) = pr.y[i];
        }
    }
    return psi;
}

/// Shuffled Psi: pair-interleaved columns for the convex class so that one
/// pair occupies two adjacent columns; SR1 is already one column per pair.
inline Matrix assemble_psi_shuffled(const UpdateFamily& family, const PairBuffer& buffer,
                                    double gamma) {
    detail::require_nonempty(buffer);
    if (family.kind() == UpdateKind::Sr1) return assemble_psi(family, buffer, gamma);
    const std::size_t n = buffer.n();
    const std::size_t q = buffer.size();
    Matrix psi(n, 2 * q);
    for (std::size_t j = 0; j < q; ++j) {
        const Pair& pr = buffer.pair(j);
        for (std::size_t i = 0; i < n; ++i) {
            psi(i, 2 * j) = gamma * pr.s[i];
            psi(i, 2 * j + 1) = pr.y[i];
        }
    }
    return psi;
}

/// M expressed in the shuffled column order: P' M P, with
/// (P' M P)(i,j) = M(p(i), p(j)).  Identity reordering for SR1.
inline Matrix shuffled_m(const CompactForm& form) {
    if (form.family.kind() == UpdateKind::Sr1) return form.m;
    const std::size_t q = form.l() / 2;
    const std::vector<std::size_t> p = shuffle_permutation(q);
    Matrix out(form.l(), form.l());
    for (std::size_t i = 0; i < form.l(); ++i)
        for (std::size_t j = 0; j < form.l(); ++j) out(i, j) = form.m(p[i], p[j]);
    return out;
}

/// B v without forming B: gamma*v + Psi (M (Psi' v)).
inline Vector apply_b(const CompactForm& form, const Matrix& psi, const Vector& v) {
    if (psi.rows() != v.size()) throw DimensionError("apply_b: size differs");
    Vector t = multiply_transposed(psi, v);
    Vector mt = multiply(form.m, t);
    Vector out = multiply(psi, mt);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = form.gamma * v[i] + out[i];
    return out;
}

/// Dense B = gamma*I + Psi M Psi', for cross-checks at small n.
inline Matrix reconstruct_dense(const CompactForm& form, const Matrix& psi) {
    const std::size_t n = psi.rows();
    if (psi.cols() != form.l()) throw DimensionError("reconstruct_dense: Psi/M differ");
    Matrix b = multiply(multiply(psi, form.m), transpose(psi));
    for (std::size_t i = 0; i < n; ++i) b(i, i) += form.gamma;
    symmetrize(b);
    return b;
}

} // namespace lmqn
