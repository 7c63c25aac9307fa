#pragma once

#include <filesystem>
#include <string>

namespace asmprop {

/// Throws Error(Io) when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failure never leaves a truncated target behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace asmprop
