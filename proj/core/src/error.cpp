#include "ticc/error.hpp"

namespace ticc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::ragged_rows: return "ragged_rows";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_model: return "invalid_model";
    case ErrorCode::numerical_failure: return "numerical_failure";
    case ErrorCode::unknown_preset: return "unknown_preset";
  }
  return "unknown";
}

}  // namespace ticc
