#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pitchstab::cli {

// Exit codes: 0 success, 1 config/validation error, 2 numerical failure,
// 3 simulated fall (only with --fail-on-fall).
struct CommandOutcome {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::string summary;
};

CommandOutcome dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

CommandOutcome dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pitchstab::cli
