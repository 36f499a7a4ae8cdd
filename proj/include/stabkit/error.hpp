// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace stabkit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A configuration document or density specification is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not defined for this statistic or dimension.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A numeric degeneracy (zero distance, zero variance, ...) makes the result meaningless.
class Degenerate : public Error {
 public:
  using Error::Error;
};

/// A linear constraint system has no solution of the required form.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Simplex enumeration exceeded its budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace stabkit
