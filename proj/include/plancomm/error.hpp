#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plancomm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed PDDL (or goal-pool) text. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed text that violates the domain/problem contract
// (undeclared predicate, arity mismatch, unknown object, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRequirement : public ValidationError {
 public:
  explicit UnsupportedRequirement(const std::string& flag)
      : ValidationError("unsupported requirement " + flag), flag_(flag) {}
  const std::string& flag() const { return flag_; }

 private:
  std::string flag_;
};

// A configurable cap (grounding size, search expansions, enumeration) was hit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class UnsolvableError : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented range (e.g. verbalization size).
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace plancomm
