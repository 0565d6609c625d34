#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cohort::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
    kScorerError = 3,
};

/// Runs one `cohort` invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cohort::cli
