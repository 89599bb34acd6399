#pragma once

#include <stdexcept>
#include <string>

namespace cmclab {

// Base of every error the library raises. Callers that only need a message
// can catch this; the derived types mirror the failure modes of each module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// model
class BadDimension : public Error { using Error::Error; };
class AdjacencyError : public Error { using Error::Error; };
class JunctionMismatch : public Error { using Error::Error; };
class ChartError : public Error { using Error::Error; };
class NonNegativeTau : public Error { using Error::Error; };

// cmc_solver / leaf_geometry
class NotSpacelike : public Error { using Error::Error; };
class StepTooLarge : public Error { using Error::Error; };
class InsufficientLadder : public Error { using Error::Error; };
class MethodDisagreement : public Error { using Error::Error; };
class PatchTooCoarse : public Error { using Error::Error; };

// spectra
class UnknownLabel : public Error { using Error::Error; };
class ClassNotRealizable : public Error { using Error::Error; };

// cli
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error("invalid value for '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class IoError : public Error { using Error::Error; };

}  // namespace cmclab
