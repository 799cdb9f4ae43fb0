#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dpx::text {

// Uppercase, strip hyphens and whitespace. Used for part-number and alias
// lookups (vendor numbering varies in hyphenation and case).
std::string normalize_part(std::string_view s);

// Lowercased alphanumeric runs of length >= 2.
std::vector<std::string> lower_tokens(std::string_view s);

// Case-preserved tokens for electrical symbols: [A-Za-z0-9_]+ runs with an
// optional trailing "(inner)" qualifier, e.g. "h_FE", "V_GS(th)", "R_DS(on)".
// Tokens must contain at least one letter and be at least 2 chars long.
std::vector<std::string> symbol_tokens(std::string_view s);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Split on a delimiter, trimming each piece; empty pieces dropped.
std::vector<std::string> split_trimmed(std::string_view s, char delim);

// Case-insensitive substring test.
bool icontains(std::string_view haystack, std::string_view needle);

// printf-style helper (project targets libstdc++ 11, no std::format).
std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

// Shortest round-trippable decimal rendering with 6 significant digits.
std::string format_number(double v);

}  // namespace dpx::text
