#pragma once

#include <string>
#include <vector>

namespace warden::io {

// Whole-file read; throws warden::Error with the path on failure.
std::string read_file(const std::string& path);

// Whole-file write, creating parent directories as needed.
void write_file(const std::string& path, const std::string& content);

// Regular files in `dir` with the given extension (e.g. ".eaf"), sorted by
// path for deterministic traversal order.
std::vector<std::string> list_files(const std::string& dir, const std::string& extension);

}  // namespace warden::io
