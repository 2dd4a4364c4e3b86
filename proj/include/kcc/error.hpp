#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kcc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape, range, finiteness).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Cholesky factorization failed even at the largest jitter tried.
class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(std::size_t minor_index, double jitter)
        : Error("matrix is not positive definite: leading minor of order " +
                std::to_string(minor_index) + " failed (jitter " + std::to_string(jitter) + ")"),
          minor_index_(minor_index), jitter_(jitter) {}

    /// Order (1-based) of the smallest leading minor that was not positive.
    std::size_t minor_index() const noexcept { return minor_index_; }
    double jitter() const noexcept { return jitter_; }

private:
    std::size_t minor_index_;
    double jitter_;
};

class SingularEmbedding : public Error {
public:
    using Error::Error;
};

/// Non-finite values appeared in the solver iterates.
class Divergence : public Error {
public:
    explicit Divergence(int iteration)
        : Error("ADMM iterates became non-finite at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// Malformed CSV input. Row and column are 1-based as they appear in the file.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : Error("parse error at row " + std::to_string(row) + ", column " + std::to_string(column) +
                ": " + what),
          row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

} // namespace kcc
