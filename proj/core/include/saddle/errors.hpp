#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad matrix, bad schedule, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Floating-point breakdown: non-finite values, singular systems, inner solver
/// non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The dense eigensolver reported failure. Kept separate so callers never
/// confuse it with a classification result.
class EigenSolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterate left the domain an operation is defined on (simplex boundary,
/// origin of the sphere projection, certified neighborhood B(0, delta)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A bound could not be certified numerically (e.g. a series that does not
/// decay).
class CertificationError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace saddle
