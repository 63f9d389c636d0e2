#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vshape {

/// Base class for errors reported to users of the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or static-checking failure in a program text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Failure while evaluating a program (match failure, bad application, ...).
class RuntimeError : public Error {
 public:
  using Error::Error;
};

}  // namespace vshape
