#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace uaradar {

// Throws Error(MissingFile) when the path cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partially written file. Throws Error(IoError).
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace uaradar
