#include "text.hpp"

#include <algorithm>

#include "galv/decimal.hpp"

namespace galv::ingest::text {

namespace {

bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool plausible_name(std::string_view name) noexcept {
  if (name.empty()) return false;
  if (name.find_first_of("()/\t\",") != std::string_view::npos) return false;
  // A numeric "name" means we are looking at data, not a header.
  return !parse_decimal(name).has_value();
}

}  // namespace

std::size_t bom_length(std::string_view bytes) noexcept {
  return bytes.starts_with(kUtf8Bom) ? kUtf8Bom.size() : 0;
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char separator) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(separator, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<Line> next_line(std::string_view bytes, std::size_t offset) noexcept {
  if (offset >= bytes.size()) return std::nullopt;
  const auto nl = bytes.find('\n', offset);
  if (nl == std::string_view::npos) return std::nullopt;
  auto content = bytes.substr(offset, nl - offset);
  if (content.ends_with('\r')) content.remove_suffix(1);
  return Line{content, nl + 1};
}

std::string_view first_line(std::string_view bytes) noexcept {
  auto line = bytes.substr(0, std::min(bytes.find('\n'), bytes.size()));
  if (line.ends_with('\r')) line.remove_suffix(1);
  return line;
}

std::optional<NameUnit> split_paren_unit(std::string_view token) noexcept {
  token = trim(token);
  if (token.ends_with(')')) {
    const auto open = token.rfind('(');
    if (open == std::string_view::npos) return std::nullopt;
    const auto unit = trim(token.substr(open + 1, token.size() - open - 2));
    const auto name = trim(token.substr(0, open));
    if (unit.empty() || unit.find_first_of("()") != std::string_view::npos) return std::nullopt;
    if (!plausible_name(name)) return std::nullopt;
    return NameUnit{name, unit};
  }
  if (!plausible_name(token)) return std::nullopt;
  return NameUnit{token, {}};
}

std::optional<NameUnit> split_slash_unit(std::string_view token) noexcept {
  token = trim(token);
  const auto pos = token.rfind(" /");
  if (pos == std::string_view::npos) return std::nullopt;
  const auto name = trim(token.substr(0, pos));
  const auto unit = token.substr(pos + 2);
  if (unit.empty() ||
      std::any_of(unit.begin(), unit.end(), [](char c) { return is_space(c) || c == '/'; })) {
    return std::nullopt;
  }
  if (!plausible_name(name)) return std::nullopt;
  return NameUnit{name, unit};
}

}  // namespace galv::ingest::text
