#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace galv::ingest::text {

inline constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

std::size_t bom_length(std::string_view bytes) noexcept;
std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view line, char separator);

struct Line {
  std::string_view content;  // without the terminator or a trailing '\r'
  std::size_t next = 0;      // offset just past the '\n'
};

/// The complete line starting at `offset`, or nullopt if no '\n' follows.
std::optional<Line> next_line(std::string_view bytes, std::size_t offset) noexcept;

/// First line of `bytes` whether or not it is terminated.
std::string_view first_line(std::string_view bytes) noexcept;

/// Splits "name (unit)" into its parts; unit is empty for a bare name.
/// Returns nullopt if the token is not of either shape.
struct NameUnit {
  std::string_view name;
  std::string_view unit;
};
std::optional<NameUnit> split_paren_unit(std::string_view token) noexcept;
/// Splits "name /unit"; nullopt if the token lacks that shape.
std::optional<NameUnit> split_slash_unit(std::string_view token) noexcept;

}  // namespace galv::ingest::text
