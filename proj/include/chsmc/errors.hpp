#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chsmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input to the inverse Neumann Laplacian is not mean-free.
class NonZeroMean : public Error {
public:
    using Error::Error;
};

/// A scalar resolvent solve did not reach its residual tolerance.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The initial mean of the order parameter lies outside int(D(beta)).
class MeanOutsideDomain : public Error {
public:
    using Error::Error;
};

/// The convex potential is +inf on some initial sample.
class PotentialInfinite : public Error {
public:
    using Error::Error;
};

/// A time step produced values beyond the blowup threshold or non-finite values.
class Blowup : public Error {
public:
    using Error::Error;
};

class MeanMismatch : public Error {
public:
    using Error::Error;
};

class ParamMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A parameter violates its precondition. Carries the offending field name.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace chsmc
