#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace reqterm::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// One CSV record. Fields containing separators, quotes or newlines are quoted
// on write; parsing accepts quoted and bare fields.
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(const std::string& line);

// Formats a double with enough digits to round-trip bit-exactly.
std::string fmt_double(double v);

// Lines of a text file, '#' comment lines and blank lines dropped.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

}  // namespace reqterm::io
