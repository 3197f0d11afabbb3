#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stlcp {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Unbounded,
  SignalTooShort,
  DimensionMismatch,
  NotPnf,
  NormMismatch,
  HorizonExceeded,
  MissingId,
  Io,
  Format,
  CalibrationMismatch,
  Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Syntax error in formula text. `position()` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace stlcp
