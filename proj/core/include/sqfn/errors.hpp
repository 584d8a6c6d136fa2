#pragma once

#include <stdexcept>
#include <string>

namespace sqfn {

// Base of every error thrown by the library. The CLI maps the subclasses to
// exit codes (configuration -> 2, capacity -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DegenerateDomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DegenerateWeightError : public Error {
 public:
  using Error::Error;
};

class KernelError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition of an operation (geometry of the
// inputs, mean-zero requirement, nesting of cubes, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqfn
