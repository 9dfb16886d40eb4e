#pragma once

#include <stdexcept>
#include <string>

namespace tilekit {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed graph input (same-part edge, index out of range, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// An argument outside the documented domain of an operation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Instance too large for an exact method; distinct from a negative answer.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A stated hypothesis of an operation does not hold on the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An internal invariant failed. Indicates a bug or a false theorem.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// A supplied certificate or solution does not check out.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tilekit
