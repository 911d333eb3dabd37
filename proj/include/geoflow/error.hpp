#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace geoflow {

// Every error raised by the library derives from Error. The CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (non-dominant weights, bad records, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// Evaluation point outside the half-plane where a class series converges.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// The spectrum's completeness cutoff cannot deliver the requested tail bound.
class InsufficientSpectrumError : public Error {
public:
    using Error::Error;
};

// A spectral model violates one of its structural invariants.
class ModelError : public Error {
public:
    using Error::Error;
};

// Evaluation hit a pole of Gamma, digamma or of an explicit partial fraction.
class PoleError : public Error {
public:
    PoleError(const std::string& what, std::complex<double> where)
        : Error(what), location_(where) {}
    std::complex<double> location() const { return location_; }

private:
    std::complex<double> location_;
};

// Closed-form denominator vanishes.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// A value that must be an integer is not (within tolerance).
class IntegralityError : public Error {
public:
    using Error::Error;
};

// Numerical consistency check failed; signals a bug rather than bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace geoflow
