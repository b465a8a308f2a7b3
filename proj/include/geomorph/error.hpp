#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geomorph {

enum class ErrorKind {
  DuplicateValue,
  EmptyFeature,
  UnknownValue,
  DuplicateCell,
  ShapeMismatch,
  ZeroColumn,
  EmptyInventory,
  UnknownStem,
  DegenerateSum,
  EmptyFilter,
  BadAxis,
  SyntaxError,
  UndeclaredName,
  DuplicateDeclaration,
  InvalidArgument,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateValue: return "DuplicateValue";
    case ErrorKind::EmptyFeature: return "EmptyFeature";
    case ErrorKind::UnknownValue: return "UnknownValue";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::EmptyInventory: return "EmptyInventory";
    case ErrorKind::UnknownStem: return "UnknownStem";
    case ErrorKind::DegenerateSum: return "DegenerateSum";
    case ErrorKind::EmptyFilter: return "EmptyFilter";
    case ErrorKind::BadAxis: return "BadAxis";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UndeclaredName: return "UndeclaredName";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error tied to a position in a paradigm file (1-based line and column).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t line, std::size_t column, const std::string& what)
      : Error(kind, "line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace geomorph
