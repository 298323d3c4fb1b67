#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "galv/ingest/format.hpp"
#include "text.hpp"

namespace galv::ingest {

namespace {

struct MappingRow {
  std::string_view source;  // lower case
  std::string_view type_name;
  std::string_view unit;
};

constexpr std::array kColumnTable{
    MappingRow{"volts", "voltage", "V"},     MappingRow{"e", "voltage", "V"},
    MappingRow{"amps", "current", "A"},      MappingRow{"i", "current", "A"},
    MappingRow{"testtime", "time", "s"},     MappingRow{"time", "time", "s"},
    MappingRow{"rec#", "record_index", ""},  MappingRow{"cyc#", "cycle_index", ""},
    MappingRow{"step", "step_index", ""},    MappingRow{"temp", "temperature", "degC"},
};

struct UnitRow {
  std::string_view unit;
  std::string_view type_name;
};

constexpr std::array kUnitTable{
    UnitRow{"V", "voltage"},
    UnitRow{"A", "current"},
    UnitRow{"s", "time"},
    UnitRow{"degC", "temperature"},
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view bare_name(std::string_view source) {
  if (auto slash = text::split_slash_unit(source)) return slash->name;
  if (auto paren = text::split_paren_unit(source)) return paren->name;
  return text::trim(source);
}

}  // namespace

ColumnMapping map_column(std::string_view source_name) {
  const auto key = lower(bare_name(source_name));
  for (const auto& row : kColumnTable) {
    if (row.source == key) return {std::string(row.type_name), std::string(row.unit)};
  }
  return {"unknown", ""};
}

std::optional<std::string> type_for_unit(std::string_view unit) {
  for (const auto& row : kUnitTable) {
    if (row.unit == unit) return std::string(row.type_name);
  }
  return std::nullopt;
}

}  // namespace galv::ingest
