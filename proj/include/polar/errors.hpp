#pragma once

#include <stdexcept>
#include <string>

namespace polar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-unit input data (configuration rows, instance files).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Instance text could not be parsed; carries the 1-based line and column.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, int line, int column)
      : InvalidInput("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                     what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NotPSD : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix is numerically singular (linearly dependent rows).
class SingularGram : public Error {
 public:
  using Error::Error;
};

class NotUnit : public Error {
 public:
  using Error::Error;
};

class DegenerateDiagonal : public Error {
 public:
  using Error::Error;
};

/// A sign search ended at a vector that does not satisfy its certificate.
class CertificateFailed : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class AllRestartsDegenerate : public Error {
 public:
  using Error::Error;
};

}  // namespace polar
