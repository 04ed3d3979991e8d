#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge {

// RFC 4180 records: quoted fields may hold commas, quotes ("") and newlines.
// CRLF and LF line ends are both accepted; blank lines are skipped. Throws
// ParseError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Quotes the field when it needs it.
std::string csv_field(std::string_view value);

std::string csv_row(const std::vector<std::string>& fields);

}  // namespace forge
