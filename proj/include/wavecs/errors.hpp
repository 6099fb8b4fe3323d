#pragma once

#include <stdexcept>
#include <string>

namespace wavecs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Lengths or dimensions that do not fit together.
class ShapeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Requested wavelet order or variant is not available.
class UnsupportedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Measurement budget too small for the requested recipe.
class BudgetError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Problem size exceeds a desk-scale cap (dense Gramian, brute-force enumeration).
class CapError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Solver did not reach its tolerance (raised only in strict mode).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavecs
