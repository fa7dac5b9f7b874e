#pragma once

#include <stdexcept>
#include <string>

namespace cvmw {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, out-of-domain arguments, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bessel order that is neither an integer nor a half-integer >= -1/2.
class OrderDomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Auxiliary function that violates the sign conditions of the bound.
class InvalidAuxiliaryError : public ValidationError {
 public:
  InvalidAuxiliaryError(const std::string& what, double abscissa) : ValidationError(what), abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

// Tabulated data that does not cover the abscissae a computation needs.
class CoverageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A computation that ran but could not certify its own accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Quadrature or tail estimate that failed to reach the requested tolerance.
// The best available value is attached so callers can still inspect it.
class AccuracyError : public NumericalError {
 public:
  AccuracyError(const std::string& what, double partial, double error_estimate)
      : NumericalError(what), partial_(partial), error_estimate_(error_estimate) {}
  double partial_value() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_;
  double error_estimate_;
};

// Two independent evaluation routes disagreed.
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Fock truncation too small for the requested displacement, or a state that
// keeps changing when the cutoff grows.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Argument outside the interval where a theorem-backed bound is valid.
// Carries the bound so the caller can report it verbatim.
class ValidityError : public Error {
 public:
  ValidityError(const std::string& what, double bound) : Error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

}  // namespace cvmw
