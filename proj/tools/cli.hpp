#pragma once

#include <ostream>

namespace palmdt::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kPipeline = 3 };

/// Entry point of the palmdt tool, with injectable streams for testing.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace palmdt::cli
