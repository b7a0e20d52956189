#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace typicality::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape_field(std::string_view field);

std::string join_record(const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of the whole field; returns false on trailing junk or empty input.
bool parse_double(std::string_view text, double& out);

}  // namespace typicality::csv
