#pragma once

#include <string>

#include "config.hpp"

namespace needlet::tools {

// Executes one named experiment against an effective (post-override) config.
// Returns the process exit code: 0 on success, 1 when an enforced check
// fails. Validation, regime, and truncation problems are thrown as the
// corresponding needlet error types.
int run_command(const std::string& command, const Config& cfg);

}  // namespace needlet::tools
