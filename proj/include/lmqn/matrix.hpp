#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lmqn/errors.hpp"

namespace lmqn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.  Everything in this library is either
/// n x l with l small, or l x l, so no blocking or aliasing tricks anywhere.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Vector col(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_col(std::size_t j, const Vector& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("dot: lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2_sq(const Vector& v) { return dot(v, v); }
inline double norm2(const Vector& v) { return std::sqrt(norm2_sq(v)); }

inline double norm_inf(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Row-sum infinity norm.
inline double norm_inf(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

inline double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vector multiply(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw DimensionError("multiply: matrix/vector dimensions differ");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// y = A'x without forming the transpose.
inline Vector multiply_transposed(const Matrix& a, const Vector& x) {
    if (a.rows() != x.size()) throw DimensionError("multiply_transposed: dimensions differ");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("add: shapes differ");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

inline Matrix subtract(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("subtract: shapes differ");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline void symmetrize(Matrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
}

/// Solves Lx = b with L lower triangular (forward substitution).
inline Vector solve_lower(const Matrix& L, const Vector& b) {
    const std::size_t n = L.rows();
    if (L.cols() != n || b.size() != n) throw DimensionError("solve_lower: shapes differ");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= L(i, j) * x[j];
        if (L(i, i) == 0.0) throw SingularMError("solve_lower: zero pivot", 0.0);
        x[i] = s / L(i, i);
    }
    return x;
}

/// Solves Ux = b with U upper triangular (back substitution).
inline Vector solve_upper(const Matrix& U, const Vector& b) {
    const std::size_t n = U.rows();
    if (U.cols() != n || b.size() != n) throw DimensionError("solve_upper: shapes differ");
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= U(ii, j) * x[j];
        if (U(ii, ii) == 0.0) throw SingularMError("solve_upper: zero pivot", 0.0);
        x[ii] = s / U(ii, ii);
    }
    return x;
}

/// Solves L'x = b with L lower triangular, i.e. back substitution on L'.
inline Vector solve_lower_transposed(const Matrix& L, const Vector& b) {
    const std::size_t n = L.rows();
    if (L.cols() != n || b.size() != n)
        throw DimensionError("solve_lower_transposed: shapes differ");
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= L(j, ii) * x[j];
        if (L(ii, ii) == 0.0) throw SingularMError("solve_lower_transposed: zero pivot", 0.0);
        x[ii] = s / L(ii, ii);
    }
    return x;
}

/// Solves U'x = b with U upper triangular, i.e. forward substitution on U'.
inline Vector solve_upper_transposed(const Matrix& U, const Vector& b) {
    const std::size_t n = U.rows();
    if (U.cols() != n || b.size() != n)
        throw DimensionError("solve_upper_transposed: shapes differ");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= U(j, i) * x[j];
        if (U(i, i) == 0.0) throw SingularMError("solve_upper_transposed: zero pivot", 0.0);
        x[i] = s / U(i, i);
    }
    return x;
}

} // namespace lmqn
