#include "galv/date.hpp"

#include <charconv>
#include <cstdio>

namespace galv {

namespace {

bool parse_digits(std::string_view text, int& out) {
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

Date utc_date_of(std::filesystem::file_time_type time) {
  // libstdc++ 11 lacks clock_cast; file_clock and system_clock share a
  // fixed epoch offset, so measure it once against "now".
  const auto file_now = std::filesystem::file_time_type::clock::now();
  const auto sys_now = std::chrono::system_clock::now();
  const auto sys_time = sys_now + std::chrono::duration_cast<std::chrono::system_clock::duration>(
                                      time - file_now);
  return Date{std::chrono::floor<std::chrono::days>(sys_time)};
}

}  // namespace galv
