#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sceneloop::text {

std::string_view rtrim(std::string_view s);
std::string_view trim(std::string_view s);

// Splits on '\n'. An empty string yields no lines; a single trailing newline
// does not produce a trailing empty line.
std::vector<std::string> split_lines(std::string_view s);
std::string join_lines(const std::vector<std::string>& lines);

// Equality after trimming trailing whitespace on every line and dropping
// trailing blank lines.
bool equal_modulo_trailing_whitespace(std::string_view a, std::string_view b);

// Fixed 4-decimal formatting with "-0.0000" normalised to "0.0000".
std::string fixed4(double v);

std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

// Shortest representation that parses back to the same double.
std::string shortest_double(double v);

} // namespace sceneloop::text
