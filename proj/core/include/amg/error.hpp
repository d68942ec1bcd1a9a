#pragma once

#include <stdexcept>
#include <string>

namespace amg {

// Base for every error raised by the library. Callers that only need to
// report a failure can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument value does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, division by zero, divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Binary container problems. Subclasses let callers tell a stale checksum
// apart from a file written by another format version.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace amg
