#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lmqn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class EmptyHistoryError : public Error {
public:
    using Error::Error;
};

/// A stored pair violates s'y > 0 where the update family requires it.
class CurvatureError : public Error {
public:
    CurvatureError(const std::string& msg, std::size_t index)
        : Error(msg), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// The small inner matrix of a compact form is singular to working precision.
class SingularMError : public Error {
public:
    SingularMError(const std::string& msg, double pivot)
        : Error(msg), pivot_(pivot) {}
    /// Magnitude of the offending pivot.
    double pivot() const { return pivot_; }

private:
    double pivot_;
};

/// A quantity that must be positive came out nonpositive (numerical breakdown).
class PositivityError : public Error {
public:
    using Error::Error;
};

/// A triangular factor is rank deficient or ill-conditioned; the caller must
/// rebuild from scratch.
class RankError : public Error {
public:
    using Error::Error;
};

/// An incremental update detected an inconsistency with its inputs
/// (e.g. a stale factor).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

} // namespace lmqn
