#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arsm::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

/// Runs the tool on `args` (without the program name). Tables go to `out`
/// unless --out names a directory; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace arsm::cli
