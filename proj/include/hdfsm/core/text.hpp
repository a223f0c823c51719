#pragma once

#include <string>
#include <string_view>

namespace hdfsm::text {

std::string_view trim(std::string_view s);

// Collapses runs of whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string ascii_lower(std::string_view s);

// Comparison key for titles and option labels: whitespace-normalized,
// case-folded.
std::string comparison_key(std::string_view s);

bool is_blank(std::string_view s);

bool is_valid_utf8(std::string_view s);

}  // namespace hdfsm::text
