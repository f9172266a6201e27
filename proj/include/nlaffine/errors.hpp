#pragma once

#include <stdexcept>
#include <string>

namespace nlaffine {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A matrix expected to be positive semidefinite had an eigenvalue below tolerance.
class NonPsdError : public Error {
public:
    using Error::Error;
};

class VertexCapError : public Error {
public:
    using Error::Error;
};

class NoAdmissibleVertex : public Error {
public:
    using Error::Error;
};

/// Configured time step violates the stability bound.
class CflError : public Error {
public:
    CflError(const std::string& what, double dt, double bound)
        : Error(what), dt_(dt), bound_(bound) {}
    double dt() const noexcept { return dt_; }
    double bound() const noexcept { return bound_; }

private:
    double dt_;
    double bound_;
};

/// Non-finite value or other numerical breakdown during a run.
class NumericalAbort : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nlaffine
