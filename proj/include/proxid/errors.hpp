#pragma once

#include <stdexcept>
#include <string>

namespace proxid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid graph construction, unknown vertex names, overlapping vertex sets.
class GraphError : public Error {
 public:
  using Error::Error;
};

// A table would exceed the dense state-space budget.
class StateSpaceOverflow : public Error {
 public:
  using Error::Error;
};

// Division by a quantity below the positivity threshold.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

// A bridge equation has no solution within tolerance.
class NoSolution : public Error {
 public:
  using Error::Error;
};

// A kernel operation was applied although its conditions do not hold.
class ConditionFailed : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace proxid
