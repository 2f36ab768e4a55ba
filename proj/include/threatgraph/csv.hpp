#pragma once

// Small helpers shared by the line-oriented file formats.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace threatgraph::csv {

/// Splits on ',' without quoting support; fields are returned with
/// surrounding ASCII whitespace trimmed.
std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Strict full-field parses; return nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view field);
std::optional<std::int64_t> parse_int(std::string_view field);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// True when the line is blank or a '#' comment.
bool is_skippable(std::string_view line);

}  // namespace threatgraph::csv
