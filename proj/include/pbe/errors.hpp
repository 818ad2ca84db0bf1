#pragma once

#include <stdexcept>
#include <string>

namespace pbe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: inverted grid bounds, out-of-range exponents, bad config fields.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A kernel or profile was evaluated outside its domain (e.g. nonpositive mass).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Caller broke a precondition (dimension or grid mismatch).
class ContractViolation : public Error {
public:
  using Error::Error;
};

class QuadratureError : public Error {
public:
  using Error::Error;
};

/// Step size collapsed below the underflow threshold.
class StiffnessError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace pbe
