#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mmsgeo::csv {

// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);

// RFC 4180 quoting, LF line ending.
std::string quote(const std::string& cell);
void write_row(std::ostream& out, std::span<const std::string> cells);
std::vector<std::string> split_row(const std::string& line);

}  // namespace mmsgeo::csv
