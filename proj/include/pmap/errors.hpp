#pragma once

#include <stdexcept>
#include <string>

namespace pmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, assignment, or argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A brute-force routine would exceed its configured state-space cap.
class StateSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

/// Every configuration has energy -inf.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class NotAttractive : public Error {
 public:
  using Error::Error;
};

class CycleDetected : public Error {
 public:
  using Error::Error;
};

/// A bound family violated self-reducibility beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class RestartsExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace pmap
