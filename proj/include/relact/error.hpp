#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relact {

enum class ErrorCode {
  NonOrthonormal,
  NonFinite,
  DegenerateInput,
  LengthMismatch,
  EmptyPath,
  HorizonOverrun,
  KindMismatch,
  DimensionMismatch,
  ActiveJointPerturbation,
  Unreachable,
  InvalidParameter,
  SchemaVersionMismatch,
  MalformedRecord,
  RecordTooShort,
  EmptyInput,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code; record-level errors also
// carry the offending step index.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> step = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> step_;
};

}  // namespace relact
