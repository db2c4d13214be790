#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ugr::csv {

// Splits one CSV line. Double-quoted fields may contain commas and doubled
// quotes; embedded newlines are not supported. Returns false on an
// unterminated quote.
bool split_line(std::string_view line, std::vector<std::string>& fields);

// Quotes `field` only when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

std::string_view trim(std::string_view s) noexcept;

}  // namespace ugr::csv
