#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace satgen {

// Base for every domain failure the library reports. Programming errors
// (broken internal invariants) use std::logic_error instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The constraint system has no model under the requested parameters.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The solver exhausted its conflict budget.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace satgen
