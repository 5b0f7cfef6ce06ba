#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "lmqn/errors.hpp"
#include "lmqn/matrix.hpp"

namespace lmqn {

struct SmallEig {
    Vector values;  // ascending
    Matrix vectors; // column i pairs with values[i]; 0x0 unless requested
};

/// Cyclic Jacobi for a small symmetric matrix.  Rotations are applied until
/// the off-diagonal mass reaches exact zero; entries too small to affect the
/// diagonal are flushed, which guarantees termination.  Quadratic
/// convergence makes the 64-sweep cap generous for any sane input.
inline SmallEig symmetric_eig_small(const Matrix& a_in, bool want_vectors = false) {
    const std::size_t n = a_in.rows();
    if (a_in.cols() != n) throw DimensionError("symmetric_eig_small: matrix not square");
    Matrix a = a_in;
    symmetrize(a);
    Matrix v = want_vectors ? Matrix::identity(n) : Matrix(0, 0);

    if (n <= 1) {
        SmallEig out;
        out.values = (n == 1) ? Vector{a(0, 0)} : Vector{};
        out.vectors = std::move(v);
        return out;
    }

    const std::size_t max_sweeps = 64;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
        if (off == 0.0) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double g = 100.0 * std::abs(apq);

                // Entry can no longer move the diagonal: flush it.
                if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }

                const double diff = a(q, q) - a(p, p);
                double t;
                if (std::abs(diff) + g == std::abs(diff)) {
                    t = apq / diff;
                } else {
                    const double theta = 0.5 * diff / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double h = t * apq;

                a(p, p) -= h;
                a(q, q) += h;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = arp - s * (arq + tau * arp);
                    a(p, r) = a(r, p);
                    a(r, q) = arq + s * (arp - tau * arq);
                    a(q, r) = a(r, q);
                }
                if (want_vectors) {
                    for (std::size_t r = 0; r < n; ++r) {
                        const double vrp = v(r, p);
                        const double vrq = v(r, q);
                        v(r, p) = vrp - s * (vrq + tau * vrp);
                        v(r, q) = vrq + s * (vrp - tau * vrq);
                    }
                }
            }
        }

        if (sweep + 1 == max_sweeps) {
            double rem = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) rem += std::abs(a(p, q));
            if (rem != 0.0)
                throw ConvergenceError("symmetric_eig_small: sweep cap reached");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SmallEig out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(order[i], order[i]);
    if (want_vectors) {
        out.vectors = Matrix(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

} // namespace lmqn
