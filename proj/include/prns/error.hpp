#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prns {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user-supplied parameter (degree out of range, nonpositive tolerance, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Degenerate or otherwise unusable domain description.
class InvalidDomain : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Mesh connectivity that violates the conformity invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Zero-area element or singular local system on an element.
class GeometryError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, std::ptrdiff_t pivot)
        : Error(what), pivot_(pivot) {}
    /// Index of the first (near) zero pivot, or -1 when unknown.
    std::ptrdiff_t pivot() const noexcept { return pivot_; }

private:
    std::ptrdiff_t pivot_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace prns
