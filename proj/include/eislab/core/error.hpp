#pragma once

#include <stdexcept>
#include <string>

namespace eislab {

// Base of everything the library throws on contract violations.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value left the domain a function is defined on (negative utility, phi(0) undefined, ...).
struct DomainError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Iterative method failed to meet its tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

// A setting or shock does not satisfy the preconditions of the requested operation.
struct PreconditionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace eislab
