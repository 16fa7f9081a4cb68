#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ultraheat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed scenario, out-of-range parameter, violated precondition.
/// The CLI maps this to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A well-formed request the numerics decline to answer (degenerate eigenvalue
/// crossing, non-commuting family for the commuting solver). Exit code 2.
class NumericalRefusal : public Error {
public:
    using Error::Error;
};

/// Syntax or name error in a weight expression.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : ValidationError(what + " at offset " + std::to_string(offset)), detail_(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }
    /// The message without the offset suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t offset_;
};

/// Runtime failure while evaluating an expression (division by zero).
class EvalError : public Error {
public:
    using Error::Error;
};

}  // namespace ultraheat
