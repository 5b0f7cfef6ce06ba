#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lmqn/errors.hpp"
#include "lmqn/family.hpp"
#include "lmqn/matrix.hpp"

namespace lmqn {

/// One quasi-Newton pair: s is the iterate difference, y the gradient
/// difference.  Both length n.
struct Pair {
    Vector s;
    Vector y;
};

/// Index-based split of S'Y plus S'S.  L + D + R reconstructs S'Y exactly.
struct GramBlocks {
    Matrix L;   // strictly lower part of S'Y
    Matrix D;   // diagonal part of S'Y
    Matrix R;   // strictly upper part of S'Y
    Matrix StS; // S'S
};

struct CurvatureCheck {
    bool ok = true;
    std::size_t violating_index = 0;

    explicit operator bool() const { return ok; }
};

/// FIFO history of at most m pairs with cached Gram matrices S'Y and S'S.
/// Pushing at capacity drops the oldest pair.  The caches are maintained
/// incrementally: one new row/column per push, one deleted row/column per
/// eviction, O(n*l) inner products total.
///
/// Copies are cheap snapshots; a single writer mutates, readers share copies.
class PairBuffer {
public:
    PairBuffer(std::size_t n, std::size_t m) : n_(n), m_(m) {
        if (n == 0 || m == 0) throw DimensionError("PairBuffer: n and m must be positive");
    }

    std::size_t n() const { return n_; }
    std::size_t capacity() const { return m_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    const Pair& pair(std::size_t i) const {
        if (i >= pairs_.size()) throw DimensionError("pair: index out of range");
        return pairs_[i];
    }

    /// S'Y, size() x size().  Entry (i,j) caches s_i'y_j.
    const Matrix& gram_sy() const { return gram_sy_; }
    /// S'S, symmetric.
    const Matrix& gram_ss() const { return gram_ss_; }

    void push(Pair p) {
        if (p.s.size() != n_ || p.y.size() != n_)
            throw DimensionError("push: pair length differs from buffer dimension");
        for (std::size_t i = 0; i < n_; ++i)
            if (!std::isfinite(p.s[i]) || !std::isfinite(p.y[i]))
                throw Error("push: pair entries must be finite");

        if (pairs_.size() == m_) evict_oldest();

        const std::size_t l = pairs_.size();
        Matrix sy(l + 1, l + 1), ss(l + 1, l + 1);
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < l; ++j) {
                sy(i, j) = gram_sy_(i, j);
                ss(i, j) = gram_ss_(i, j);
            }
        for (std::size_t i = 0; i < l; ++i) {
            sy(i, l) = dot(pairs_[i].s, p.y);
            sy(l, i) = dot(p.s, pairs_[i].y);
            const double ssv = dot(pairs_[i].s, p.s);
            ss(i, l) = ssv;
            ss(l, i) = ssv;
        }
        sy(l, l) = dot(p.s, p.y);
        ss(l, l) = dot(p.s, p.s);

        gram_sy_ = std::move(sy);
        gram_ss_ = std::move(ss);
        pairs_.push_back(std::move(p));
    }

    /// L/D/R split of S'Y plus S'S.  Bitwise partition, no arithmetic.
    GramBlocks gram_blocks() const {
        if (empty()) throw EmptyHistoryError("gram_blocks: no pairs stored");
        const std::size_t l = size();
        GramBlocks g{Matrix(l, l), Matrix(l, l), Matrix(l, l), gram_ss_};
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < l; ++j) {
                if (i > j)
                    g.L(i, j) = gram_sy_(i, j);
                else if (i == j)
                    g.D(i, j) = gram_sy_(i, j);
                else
                    g.R(i, j) = gram_sy_(i, j);
            }
        return g;
    }

    /// BFGS/DFP/Broyden require s_i'y_i > 0 for every stored pair.  SR1 does
    /// not; its denominator safeguard is applied where pairs are accepted.
    CurvatureCheck curvature_check(const UpdateFamily& family) const {
        CurvatureCheck c;
        if (!family.convex_class()) return c;
        for (std::size_t i = 0; i < size(); ++i)
            if (!(gram_sy_(i, i) > 0.0)) return CurvatureCheck{false, i};
        return c;
    }

    /// Columns s_0 .. s_{l-1} as an n x l matrix.
    Matrix s_matrix() const {
        Matrix S(n_, size());
        for (std::size_t j = 0; j < size(); ++j)
            for (std::size_t i = 0; i < n_; ++i) S(i, j) = pairs_[j].s[i];
        return S;
    }

    Matrix y_matrix() const {
        Matrix Y(n_, size());
        for (std::size_t j = 0; j < size(); ++j)
            for (std::size_t i = 0; i < n_; ++i) Y(i, j) = pairs_[j].y[i];
        return Y;
    }

private:
    void evict_oldest() {
        const std::size_t l = pairs_.size();
        Matrix sy(l - 1, l - 1), ss(l - 1, l - 1);
        for (std::size_t i = 1; i < l; ++i)
            for (std::size_t j = 1; j < l; ++j) {
                sy(i - 1, j - 1) = gram_sy_(i, j);
                ss(i - 1, j - 1) = gram_ss_(i, j);
            }
        gram_sy_ = std::move(sy);
        gram_ss_ = std::move(ss);
        pairs_.erase(pairs_.begin());
    }

    std::size_t n_, m_;
    std::vector<Pair> pairs_; // oldest first
    Matrix gram_sy_;
    Matrix gram_ss_;
};

} // namespace lmqn
