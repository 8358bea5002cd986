#pragma once

#include <stdexcept>
#include <string>

namespace hpwl {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: invalid arguments, unsatisfiable configuration, missing files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A dataset file exists but cannot be parsed into a valid matrix.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside the optimizer (rank deficiency, divergence, degenerate input).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hpwl
