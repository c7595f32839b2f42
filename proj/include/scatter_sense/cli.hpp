#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace scatter_sense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

struct CommandOutcome {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> artifacts;  // files written, in order
};

// args excludes the program name. Summaries go to out, diagnostics to err.
CommandOutcome run(std::span<const std::string> args, std::ostream& out, std::ostream& err);
CommandOutcome run(std::span<const std::string> args);

}  // namespace scatter_sense::cli
