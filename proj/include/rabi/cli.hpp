#pragma once

#include <iosfwd>

namespace rabi::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kUsageError = 2,
    kNumericalFailure = 3,
};

// Entry point behind the rabi-patterns executable; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rabi::cli
