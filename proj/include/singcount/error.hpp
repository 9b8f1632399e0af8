#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace singcount {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured enumeration or size budget would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: a polynomial expression, a ring spec, a scheme document.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Inputs are well-formed but violate a precondition (arity, declared dimension, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace singcount
