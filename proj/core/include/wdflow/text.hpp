#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the casting, parsing and matching code.
namespace wdflow::text {

std::string_view trim(std::string_view s);

// Splits on every occurrence of `delim`; keeps empty pieces.
std::vector<std::string_view> split(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view delim);

std::string to_lower_ascii(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

// Case-insensitive prefix strip after leading whitespace. Returns true and
// advances `s` when the prefix was present.
bool consume_prefix_icase(std::string_view& s, std::string_view prefix);

// Trims and collapses inner whitespace runs to a single space.
std::string collapse_whitespace(std::string_view s);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

std::string hex64(std::uint64_t v);

}  // namespace wdflow::text
