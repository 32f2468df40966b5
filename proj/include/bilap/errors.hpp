#pragma once

#include <stdexcept>
#include <string>

namespace bilap {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A lattice point or source lies outside the set an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid numeric argument (exponent, order, tolerance, axis, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Problem size exceeds a configured cap (dense paths).
class SizeError : public Error {
public:
    using Error::Error;
};

// Factorization failed or a quantity that must be finite is not.
class NumericError : public Error {
public:
    using Error::Error;
};

// Quadrature did not reach the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

// A fit or sweep needs more data than the grid provides.
class RangeError : public Error {
public:
    using Error::Error;
};

}  // namespace bilap
