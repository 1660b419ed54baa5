#pragma once

#include <iosfwd>

namespace fj::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNonConvergence = 3,
};

/// Environment variable naming the default directory for generated files and CSV output.
inline constexpr const char* kOutputDirEnv = "STOOGES_OUTPUT_DIR";

/// Entry point of the fj-stooges tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fj::cli
