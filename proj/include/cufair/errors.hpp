#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cufair {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Stable machine-readable name, used in reports.
  virtual const char* kind() const noexcept { return "Error"; }
};

#define CUFAIR_DECLARE_ERROR(Name)                                    \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }     \
  }

// Conditioning set of a probability has zero weight.
CUFAIR_DECLARE_ERROR(ZeroConditionMass);
// A decision space is larger than its enumeration cap.
CUFAIR_DECLARE_ERROR(EnumerationCapExceeded);
CUFAIR_DECLARE_ERROR(UnknownAlgorithm);
CUFAIR_DECLARE_ERROR(SupportTooLarge);
CUFAIR_DECLARE_ERROR(HorizonUnbounded);
// Model violates a structural invariant (weights, stochastic rows, ...).
CUFAIR_DECLARE_ERROR(InvalidModel);
CUFAIR_DECLARE_ERROR(InvalidArgument);

#undef CUFAIR_DECLARE_ERROR

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  const char* kind() const noexcept override { return "ParseError"; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that does not match the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error("schema error at '" + field + "': " + what), field_(field) {}
  const char* kind() const noexcept override { return "SchemaError"; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cufair
