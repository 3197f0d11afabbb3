#include "stlcp/error.hpp"

namespace stlcp {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Unbounded: return "unbounded formula";
    case ErrorCode::SignalTooShort: return "signal too short";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::NotPnf: return "formula not in positive normal form";
    case ErrorCode::NormMismatch: return "norm mismatch";
    case ErrorCode::HorizonExceeded: return "horizon exceeded";
    case ErrorCode::MissingId: return "missing trajectory id";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Format: return "format error";
    case ErrorCode::CalibrationMismatch: return "calibration mismatch";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

ParseError::ParseError(std::size_t position, const std::string& message)
    : Error(ErrorCode::Parse,
            "at offset " + std::to_string(position) + ": " + message),
      position_(position) {}

}  // namespace stlcp
