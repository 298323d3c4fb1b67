#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace galv {

using Date = std::chrono::year_month_day;

/// Parses a strict `YYYY-MM-DD` calendar date. Returns nullopt for anything
/// else, including dates that do not exist (2021-02-30).
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(Date date);

/// UTC calendar date of a file time point.
Date utc_date_of(std::filesystem::file_time_type time);

}  // namespace galv
