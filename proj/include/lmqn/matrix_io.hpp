#pragma once

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "lmqn/errors.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/pair_store.hpp"

namespace lmqn {

/// Text matrix format: a header line "rows cols", then one row per line.
inline Matrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_matrix: cannot open " + path);
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols))
        throw Error("load_matrix: bad header in " + path);
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (!(in >> a(i, j))) {
                std::ostringstream msg;
                msg << "load_matrix: short read at entry (" << i << ", " << j
                    << ") of " << path;
                throw Error(msg.str());
            }
    return a;
}

inline void save_matrix(const std::string& path, const Matrix& a) {
    std::ofstream out(path);
    if (!out) throw Error("save_matrix: cannot open " + path);
    out << a.rows() << ' ' << a.cols() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ' ';
            out << a(i, j);
        }
        out << '\n';
    }
    if (!out) throw Error("save_matrix: write failed for " + path);
}

/// Builds a pair buffer from matching columns of S and Y (oldest first).
inline PairBuffer buffer_from_columns(const Matrix& s, const Matrix& y,
                                      std::size_t capacity) {
    if (s.rows() != y.rows() || s.cols() != y.cols())
        throw DimensionError("buffer_from_columns: S and Y shapes differ");
    if (s.cols() == 0) throw EmptyHistoryError("buffer_from_columns: no columns");
    PairBuffer buf(s.rows(), capacity);
    for (std::size_t j = 0; j < s.cols(); ++j) buf.push(Pair{s.col(j), y.col(j)});
    return buf;
}

} // namespace lmqn
