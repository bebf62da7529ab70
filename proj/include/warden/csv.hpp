#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace warden::csv {

// RFC 4180 style parsing: quoted fields may contain commas, newlines and
// doubled quotes. Accepts both LF and CRLF line endings and a UTF-8 BOM.
// Rows are returned as-is; the caller interprets the header.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string escape_field(std::string_view field);

}  // namespace warden::csv
