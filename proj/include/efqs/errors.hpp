#pragma once

#include <stdexcept>
#include <string>

namespace efqs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense storage would exceed the configured site cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Mismatched lengths, site counts or region shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A parameter lies outside the domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A computed quantity violated an invariant it must satisfy (Hermiticity, real expectation, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Every filtered amplitude underflowed.
class DegenerateFilterError : public Error {
public:
    using Error::Error;
};

/// Iterative filter step is not a contraction.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// A time series or quadrature window does not cover the kernel support.
class CoverageError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario configuration or command-line input.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace efqs
