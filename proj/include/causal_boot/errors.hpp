#ifndef CAUSAL_BOOT_ERRORS_HPP
#define CAUSAL_BOOT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causal_boot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Graph DSL syntax error; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

class UnknownNodeError : public Error {
 public:
  explicit UnknownNodeError(const std::string& name) : Error("unknown node '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class SetOverlapError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class MissingColumnError : public Error {
 public:
  explicit MissingColumnError(const std::string& column)
      : Error("missing column '" + column + "'"), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

// A value outside a variable's declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A conditional probability was requested on an event with no mass. Carries the
// offending cell in human-readable form, e.g. "z=1 | y=0".
class ZeroSupportError : public Error {
 public:
  explicit ZeroSupportError(const std::string& cell)
      : Error("zero support for conditioning cell " + cell), cell_(cell) {}
  const std::string& cell() const { return cell_; }

 private:
  std::string cell_;
};

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_ERRORS_HPP
