#pragma once

#include <stdexcept>
#include <string>

namespace kernsgd {

// Argument outside an operation's domain (bad degree, |t| > 1, size mismatch).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not allowed in the object's current state (e.g. SGD horizon reached).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A data stream ended before the schedule horizon.
class DataExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Step size or model violates the hypotheses a bound formula requires.
class PreconditionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kernsgd
