#pragma once

#include <stdexcept>
#include <string>

namespace kmslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on numeric arguments was violated (exponent out of range, etc).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Two fields that must live on the same grid do not.
class GridMismatch : public Error {
public:
  using Error::Error;
};

/// The nonlinearity has no closed-form primitive in s.
class NonVariational : public Error {
public:
  using Error::Error;
};

/// A scaling sweep has fewer than the four points a slope fit needs.
class InsufficientSweep : public Error {
public:
  using Error::Error;
};

/// Malformed or incomplete run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace kmslab
