#pragma once

#include <stdexcept>
#include <string>

namespace hpm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input: shape mismatch, bad labels, parse
/// failures, parameters outside their domain.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite iterates, overflow of exact integer quantities, singular systems.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hpm
