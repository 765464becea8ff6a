#pragma once

#include <stdexcept>
#include <string>

namespace drape {

/// Base of every error the engine raises.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed documents, failed lints, invalid specs. CLI exit code 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Failure while fitting or rendering valid inputs. CLI exit code 3.
class RenderError : public Error {
public:
  using Error::Error;
};

class SchemaError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Degenerate least-squares or linear-system fit.
class FitError : public RenderError {
public:
  using RenderError::RenderError;
};

/// A template cannot be applied to the garment or outfit it was given.
class EditError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// Syntax or lint error in an edit template, with a 1-based source position.
class DslError : public ValidationError {
public:
  DslError(int line, int column, const std::string &message)
      : ValidationError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line), column_(column), detail_(message) {}
  /// Same error located in a file: "file:line:col: message".
  DslError(const std::string &file, const DslError &e)
      : ValidationError(file + ":" + e.what()), line_(e.line_), column_(e.column_), detail_(e.detail_) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string &detail() const { return detail_; }

private:
  int line_;
  int column_;
  std::string detail_;
};

} // namespace drape
