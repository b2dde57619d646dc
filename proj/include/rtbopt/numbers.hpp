#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rtbopt {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Whole-string decimal parse; nullopt on trailing garbage or overflow.
std::optional<double> parse_number(std::string_view text);

}  // namespace rtbopt
