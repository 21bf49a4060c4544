#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ticc {

enum class ErrorCode {
  invalid_argument,
  io_error,
  parse_error,
  ragged_rows,
  empty_input,
  dimension_mismatch,
  invalid_model,
  numerical_failure,
  unknown_preset,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. `code()` is stable and used by the CLI for
/// machine-readable error reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ticc
