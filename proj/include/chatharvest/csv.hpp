#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chatharvest::csv {

/// Quotes a field when it contains a comma, double quote, CR or LF; embedded
/// quotes are doubled.
std::string escape(std::string_view field);

/// One record terminated by CRLF.
std::string format_record(const std::vector<std::string>& fields);

/// Parses RFC 4180 text (CRLF or LF line ends). A trailing line break does
/// not produce an extra empty record. Throws Error on an unterminated quoted
/// field or on stray characters after a closing quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace chatharvest::csv
