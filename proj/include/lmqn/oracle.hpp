#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "lmqn/errors.hpp"
#include "lmqn/family.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/pair_store.hpp"

namespace lmqn {

/// SR1 acceptance safeguard: the update denominator s'(y - Bs) must not be
/// negligible against ||s|| ||y - Bs||.
inline bool sr1_safe(const Vector& s, const Vector& y_minus_bs) {
    const double denom = std::abs(dot(s, y_minus_bs));
    // denom == 0 covers the exact-secant residual, where the rank-1 term is 0/0.
    return denom != 0.0 && denom >= 1e-8 * norm2(s) * norm2(y_minus_bs);
}

/// One dense quasi-Newton update of B with pair (s, y).  For SR1 a skipped
/// update (safeguard trip) leaves B unchanged and returns false.
inline bool dense_update(Matrix& b, const Vector& s, const Vector& y,
                         const UpdateFamily& family) {
    const std::size_t n = b.rows();
    if (b.cols() != n || s.size() != n || y.size() != n)
        throw DimensionError("dense_update: shapes differ");

    if (family.kind() == UpdateKind::Sr1) {
        Vector bs = multiply(b, s);
        Vector r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - bs[i];
        if (!sr1_safe(s, r)) return false;
        const double denom = dot(s, r);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) b(i, j) += r[i] * r[j] / denom;
        symmetrize(b);
        return true;
    }

    const double sty = dot(s, y);
    if (!(sty > 0.0)) throw CurvatureError("dense_update: nonpositive s'y", 0);
    Vector bs = multiply(b, s);
    const double sbs = dot(s, bs);
    if (!(sbs > 0.0)) throw PositivityError("dense_update: s'Bs not positive");

    // BFGS part: B - Bs s'B / s'Bs + y y' / y's
    Matrix next = b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            next(i, j) += y[i] * y[j] / sty - bs[i] * bs[j] / sbs;

    // convex-class correction: + phi * s'Bs * w w', w = y/y's - Bs/s'Bs
    const double phi = (family.kind() == UpdateKind::Dfp) ? 1.0 : family.phi();
    if (phi != 0.0) {
        Vector w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = y[i] / sty - bs[i] / sbs;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next(i, j) += phi * sbs * w[i] * w[j];
    }
    symmetrize(next);
    b = std::move(next);
    return true;
}

struct DenseBuild {
    Matrix b;
    std::vector<std::size_t> skipped; // SR1 pairs whose update was suppressed
};

/// Recursive dense reference: B0 = gamma*I, then one update per stored pair
/// in age order.
inline DenseBuild dense_build(const UpdateFamily& family, const PairBuffer& buffer,
                              double gamma) {
    if (buffer.empty()) throw EmptyHistoryError("dense_build: no pairs");
    if (!(gamma > 0.0)) throw PositivityError("dense_build: gamma must be positive");
    const std::size_t n = buffer.n();
    DenseBuild out{Matrix::identity(n), {}};
    for (std::size_t i = 0; i < n; ++i) out.b(i, i) = gamma;
    for (std::size_t k = 0; k < buffer.size(); ++k) {
        const Pair& p = buffer.pair(k);
        if (!dense_update(out.b, p.s, p.y, family)) out.skipped.push_back(k);
    }
    return out;
}

namespace detail {

/// Householder reduction of a symmetric matrix to tridiagonal form, values
/// only: d gets the diagonal, e the subdiagonal (e[0] unused).
inline void tridiagonalize(Matrix a, Vector& d, Vector& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = n; i-- > 2;) {
        const std::size_t l = i - 1;
        double scale = 0.0;
        for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
        if (scale == 0.0) {
            e[i] = a(i, l);
            continue;
        }
        double h = 0.0;
        for (std::size_t k = 0; k <= l; ++k) {
            a(i, k) /= scale;
            h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;

        // p = A u / h restricted to the leading block, then the rank-two
        // correction A <- A - u q' - q u'
        Vector p(i, 0.0);
        double utp = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k <= j; ++k) sum += a(j, k) * a(i, k);
            for (std::size_t k = j + 1; k <= l; ++k) sum += a(k, j) * a(i, k);
            p[j] = sum / h;
            utp += p[j] * a(i, j);
        }
        const double kk = utp / (2.0 * h);
        for (std::size_t j = 0; j <= l; ++j) p[j] -= kk * a(i, j);
        for (std::size_t j = 0; j <= l; ++j)
            for (std::size_t k = 0; k <= j; ++k)
                a(j, k) -= a(i, j) * p[k] + p[j] * a(i, k);
    }
    if (n >= 2) e[1] = a(1, 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, values
/// only.  Throws ConvergenceError past 64 shifts for one eigenvalue.
inline void tridiagonal_eig(Vector& d, Vector& e) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        std::size_t iter = 0;
        while (true) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m == l) break;
            if (iter++ == 64)
                throw ConvergenceError("tridiagonal_eig: shift cap reached");

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    std::sort(d.begin(), d.end());
}

} // namespace detail

/// All eigenvalues of a dense symmetric matrix, ascending.  Guarded against
/// accidental use at scale: this is the O(n^3) reference path.
inline Vector dense_eigenvalues(const Matrix& b) {
    const std::size_t n = b.rows();
    if (b.cols() != n) throw DimensionError("dense_eigenvalues: matrix not square");
    if (n > 5000) throw Error("dense_eigenvalues: dimension cap exceeded");
    if (n == 0) return {};
    if (n == 1) return {b(0, 0)};
    Matrix a = b;
    symmetrize(a);
    Vector d, e;
    detail::tridiagonalize(std::move(a), d, e);
    detail::tridiagonal_eig(d, e);
    return d;
}

/// Closed-form spectrum after one BFGS update of (1/theta) I with
/// theta = s's / s'y: the quadratic
///   lambda^2 - (1/theta + y'y/s'y) lambda + 1/theta^2 = 0
/// gives the two moved eigenvalues, 1/theta stays with multiplicity n - 2.
inline Vector appendix_spectrum(const Vector& s, const Vector& y, std::size_t n) {
    if (s.size() != y.size()) throw DimensionError("appendix_spectrum: lengths differ");
    if (n < 2) throw DimensionError("appendix_spectrum: dimension must be at least 2");
    const double sty = dot(s, y);
    if (!(sty > 0.0)) throw CurvatureError("appendix_spectrum: nonpositive s'y", 0);
    const double theta = dot(s, s) / sty;
    const double base = 1.0 / theta;
    const double bcoef = base + dot(y, y) / sty;
    const double ccoef = base * base;

    // stable quadratic roots; discriminant is nonnegative by Cauchy-Schwarz
    // and bcoef is positive, so the larger root never cancels
    const double disc = std::max(0.0, bcoef * bcoef - 4.0 * ccoef);
    const double big = 0.5 * (bcoef + std::sqrt(disc));
    const double small = ccoef / big;

    Vector out;
    out.reserve(n);
    out.push_back(std::min(big, small));
    for (std::size_t i = 0; i + 2 < n; ++i) out.push_back(base);
    out.push_back(std::max(big, small));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace lmqn
