#pragma once

#include <stdexcept>
#include <string>

namespace sas {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition did not hold (bad scale, bad parameter, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The operation needs at least one foreground voxel.
class EmptyShapeError : public Error {
 public:
  explicit EmptyShapeError(const std::string& what = "empty shape") : Error(what) {}
};

class DimsMismatchError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDatatypeError : public FormatError {
 public:
  explicit UnsupportedDatatypeError(int code)
      : FormatError("unsupported datatype " + std::to_string(code)), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnreachableTargetError : public Error {
 public:
  using Error::Error;
};

class DegenerateShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace sas
