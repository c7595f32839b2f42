#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scatter_sense {

// Minimal comma-separated reader: no quoting, cells trimmed, blank lines skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Whole-string decimal parse; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace scatter_sense
