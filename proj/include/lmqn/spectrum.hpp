#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "lmqn/compact.hpp"
#include "lmqn/errors.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/qr_engine.hpp"
#include "lmqn/small_eig.hpp"

namespace lmqn {

/// Full spectrum of B = gamma*I + Psi M Psi' at dimension n: the base value
/// gamma with multiplicity n - l, plus l shifted values gamma + d_i where the
/// d_i are the eigenvalues of R1 (P'MP) R1'.
struct Spectrum {
    double gamma = 1.0;
    std::size_t n = 0;
    std::size_t base_multiplicity = 0;
    Vector shifted; // ascending, length l

    /// All n eigenvalues, ascending.
    Vector all_eigenvalues() const {
        Vector out;
        out.reserve(n);
        std::size_t i = 0, g = 0;
        while (i < shifted.size() || g < base_multiplicity) {
            if (g < base_multiplicity && (i == shifted.size() || gamma <= shifted[i])) {
                out.push_back(gamma);
                ++g;
            } else {
                out.push_back(shifted[i]);
                ++i;
            }
        }
        return out;
    }
};

/// Computes the spectrum from the compact form and the triangular factor of
/// the shuffled Psi.  Cost is O(l^3) for the small eigensolve; nothing here
/// touches a dense n x n object.
inline Spectrum eigenvalues(const CompactForm& form, const ThinQR& qr, std::size_t n) {
    const std::size_t l = form.l();
    if (qr.l() != l) throw DimensionError("eigenvalues: factor and form disagree");
    if (n < l) throw DimensionError("eigenvalues: dimension smaller than history");

    Spectrum spec;
    spec.gamma = form.gamma;
    spec.n = n;
    spec.base_multiplicity = n - l;
    if (l == 0) return spec;

    const Matrix mshuf = shuffled_m(form);
    const Matrix& r1 = qr.r1();
    Matrix a = multiply(multiply(r1, mshuf), transpose(r1));
    symmetrize(a);

    const SmallEig eig = symmetric_eig_small(a);
    spec.shifted.resize(l);
    for (std::size_t i = 0; i < l; ++i) spec.shifted[i] = form.gamma + eig.values[i];
    std::sort(spec.shifted.begin(), spec.shifted.end());
    return spec;
}

/// |lambda| sorted ascending; B is symmetric so these are its singular values.
inline Vector singular_values(const Spectrum& spec) {
    Vector sv = spec.all_eigenvalues();
    for (double& v : sv) v = std::abs(v);
    std::sort(sv.begin(), sv.end());
    return sv;
}

/// max|lambda| / min|lambda|; throws PositivityError on a singular spectrum.
inline double condition_number(const Spectrum& spec) {
    const Vector sv = singular_values(spec);
    if (sv.empty()) throw DimensionError("condition_number: empty spectrum");
    if (sv.front() == 0.0) throw PositivityError("condition_number: singular matrix");
    return sv.back() / sv.front();
}

} // namespace lmqn
