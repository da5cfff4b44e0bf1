#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qpgm::io {

using CsvRow = std::vector<std::string>;

/// Comma-separated, RFC 4180 quoting, LF or CRLF line ends. Blank lines are
/// skipped. Throws ParseError on an unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Quotes the field if it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

std::string csv_line(const CsvRow& fields);

}  // namespace qpgm::io
