#pragma once

#include <stdexcept>
#include <string>

namespace wbp {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent caller input (shapes, simplex violations, bad entries).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (log of zero, b_i <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A broken internal invariant or a non-finite intermediate.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or problem instance exceeds a configured size guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// The request is well-formed but outside what the operation covers (e.g. m != 2 flow export).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Numerical trouble in the exact LP oracle.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbp
