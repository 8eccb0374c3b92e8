#include "relact/error.hpp"

namespace relact {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonOrthonormal: return "NonOrthonormal";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyPath: return "EmptyPath";
    case ErrorCode::HorizonOverrun: return "HorizonOverrun";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ActiveJointPerturbation: return "ActiveJointPerturbation";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::RecordTooShort: return "RecordTooShort";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& what,
                           std::optional<std::size_t> step) {
  std::string msg(to_string(code));
  if (step) msg += " at step " + std::to_string(*step);
  if (!what.empty()) msg += ": " + what;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& what,
             std::optional<std::size_t> step)
    : std::runtime_error(format_message(code, what, step)),
      code_(code),
      step_(step) {}

}  // namespace relact
