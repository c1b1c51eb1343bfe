#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quadrix {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is the 0-based column of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation left the domain of a function (log of a nonpositive value, overflow, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The pointwise strict-convexity certificate failed.
class ConvexityError : public Error {
public:
    using Error::Error;
};

/// An iterative solver did not converge or landed on the wrong branch.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A request lies outside the admissible range (offset outside I_k, point outside the chart, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace quadrix
