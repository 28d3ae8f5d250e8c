#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edap::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kFailure = 3, kAuditViolation = 4 };

/// Entry point behind the `edap` binary; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edap::cli
