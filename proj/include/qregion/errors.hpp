#pragma once

#include <stdexcept>
#include <string>

namespace qregion {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad truncation parameters (dim < 2, effective_dim out of range, tol <= 0).
class InvalidTruncation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a numerical precondition that cannot be met.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qregion
