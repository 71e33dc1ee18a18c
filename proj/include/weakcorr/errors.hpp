#pragma once

#include <stdexcept>
#include <string>

namespace weakcorr {

// Errors the caller can fix by changing the invocation or the run configuration.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or missing input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors raised by the numerics themselves.
class NumericalDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace weakcorr
