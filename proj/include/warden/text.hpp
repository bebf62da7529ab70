#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace warden::text {

// Decodes UTF-8 into code points. Invalid byte sequences decode to U+FFFD
// (one replacement per offending byte) so edit distances stay well defined
// on dirty input.
std::vector<char32_t> to_codepoints(std::string_view utf8);

std::string from_codepoints(const std::vector<char32_t>& cps);

// Canonical composition (NFC). PHOIBLE segment symbols and field lexicons
// mix precomposed and combining-mark encodings of the same grapheme.
std::string nfc(std::string_view utf8);

std::string trim(std::string_view s);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split_tokens(std::string_view s);

// Removes leading/trailing ASCII punctuation from a token. Interior
// punctuation (hyphens in affixed forms) is kept.
std::string strip_edge_punctuation(std::string_view token);

std::string to_lower_ascii(std::string_view s);

bool iequals_ascii(std::string_view a, std::string_view b);

// Scoring normalization: lowercase, delete punctuation characters,
// collapse whitespace. Applied identically to references and hypotheses.
std::string normalize_for_scoring(std::string_view s);

std::size_t count_tokens(std::string_view s);

// Fixed-point decimal rendering ("0.14" for format_fixed(0.1428, 2)).
std::string format_fixed(double value, int decimals);

}  // namespace warden::text
