#pragma once

#include <stdexcept>
#include <string>

namespace wbary {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An instance or intermediate structure does not fit the configured budget
/// (64-bit combination count overflow, memory cap, oracle cap).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A combination index or tuple component is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// The simplex basis became singular or too ill-conditioned to continue.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance input (file or in-memory).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbary
