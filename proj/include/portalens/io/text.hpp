#pragma once

// Small helpers shared by the line-oriented file formats.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace portalens::text {

std::vector<std::string_view> split(std::string_view line, char sep = '\t');

/// Strict conversions: the whole field must parse. Throw InputError.
double to_real(std::string_view s);
std::int64_t to_int(std::string_view s);
std::uint64_t to_uint(std::string_view s);

/// Backslash-escapes tab, newline, carriage return and backslash.
std::string escape(std::string_view s);
std::string unescape(std::string_view s);

/// Reads the next line without its terminator (a trailing \r is dropped).
bool next_line(std::istream& in, std::string& line);

} // namespace portalens::text
