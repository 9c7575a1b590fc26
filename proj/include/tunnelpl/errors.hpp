#pragma once

#include <stdexcept>
#include <string>

namespace tunnelpl {

// Error categories. The CLI maps each category to a distinct exit status.
enum class ErrorKind {
  Domain,           // argument outside the mathematical domain (log of d <= 0, ...)
  Precondition,     // caller broke an operation's precondition
  Identifiability,  // data cannot determine the four model parameters
  Degenerate,       // fit or model is degenerate (gamma <= 0, flat far region, ...)
  Inversion,        // a loss cannot be mapped back to a distance
  Parse,            // malformed input file
  Validation,       // well-formed input that violates a schema invariant
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class IdentifiabilityError : public Error {
 public:
  explicit IdentifiabilityError(const std::string& what) : Error(ErrorKind::Identifiability, what) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorKind::Degenerate, what) {}
};

class InversionError : public Error {
 public:
  explicit InversionError(const std::string& what) : Error(ErrorKind::Inversion, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string column = {})
      : Error(ErrorKind::Parse, what), line_(line), column_(std::move(column)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

}  // namespace tunnelpl
