#pragma once

#include <stdexcept>
#include <string>

namespace lowform {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (vector length, matrix size, variable count).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed input document (JSON schema violations, bad values).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A feasible set turned out to be empty or unbounded.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An iterative method hit its cap without meeting its stopping rule.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace lowform
