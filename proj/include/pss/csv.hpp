#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pss::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends, and a
// leading UTF-8 byte-order mark. Blank lines are skipped.
std::vector<Row> parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);

void write_row(std::ostream& out, const Row& row);

// Locale-independent fixed-point rendering ("27.72"), never scientific.
std::string fixed(double value, int decimals);

// Shortest round-trip decimal rendering of a double.
std::string shortest(double value);

}  // namespace pss::csv
