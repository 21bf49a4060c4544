#pragma once

#include <ostream>

namespace ticc::cli {

/// Entry point shared by the executable and the tests. Errors are reported
/// as {"error": {"code", "message"}} on `err`; returns the process exit code
/// (0 success, 1 runtime error, 2 usage error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ticc::cli
