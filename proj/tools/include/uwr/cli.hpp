#pragma once

#include <iosfwd>

namespace uwr::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kSolver = 4 };

// Entry point of the uwrsense tool; never throws. Output goes to out/err so
// tests can run commands in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uwr::cli
