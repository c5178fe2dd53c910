#pragma once

#include <stdexcept>
#include <string>

namespace hydrovec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something that violates an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Two grids that must share georeferencing do not.
class GeoreferenceMismatch : public InputError {
 public:
  GeoreferenceMismatch() : InputError("georeference mismatch") {}
  explicit GeoreferenceMismatch(const std::string& detail)
      : InputError("georeference mismatch: " + detail) {}
};

/// Reading or writing a file failed (missing file, short read, bad permissions).
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its contents are not in a supported layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A graph expected to be a DAG contains a cycle.
class CycleError : public Error {
 public:
  CycleError() : Error("network not acyclic") {}
};

}  // namespace hydrovec
