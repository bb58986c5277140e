#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rvlab {

inline constexpr const char* kVersion = "0.3.0";

// Runs one CLI invocation. Returns the process exit code: 0 success,
// 1 violation or computation error, 2 advisory, 64 usage error.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rvlab
