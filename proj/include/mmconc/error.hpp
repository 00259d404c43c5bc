#pragma once

#include <stdexcept>
#include <string>

namespace mmconc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input (bad file, bad arguments, axiom violations).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed its configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmconc
