#ifndef RBFDET_ERRORS_HPP
#define RBFDET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rbfdet {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller-supplied value violates a documented precondition.
class InvalidParameterError : public Error {
public:
    explicit InvalidParameterError(const std::string& msg) : Error(msg) {}
};

/// Vector/matrix dimensions do not agree.
class DimensionMismatchError : public InvalidParameterError {
public:
    explicit DimensionMismatchError(const std::string& msg) : InvalidParameterError(msg) {}
};

/// Malformed input file (bad header, truncated payload, ...).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Non-finite values or other numeric trouble inside a solver.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure; message carries the offending path.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace rbfdet

#endif
