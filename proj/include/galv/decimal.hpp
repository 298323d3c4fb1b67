#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace galv {

/// Shortest-safe lossless rendering: 17 significant digits, so parsing the
/// result reproduces the exact binary64. NaN/Inf render as nan/inf/-inf.
std::string format_decimal17(double value);

/// Strict decimal float: optional sign, digits with `.` as the only
/// separator, optional exponent. NaN, Inf and -Inf are accepted in any case.
/// Surrounding spaces are ignored; anything else yields nullopt.
std::optional<double> parse_decimal(std::string_view text);

}  // namespace galv
