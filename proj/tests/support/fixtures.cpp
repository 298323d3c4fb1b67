#include "support/fixtures.hpp"

#include <cmath>
#include <random>

#include "galv/decimal.hpp"

namespace galv::testing {

using ingest::Format;

namespace {

char separator(Format format) { return format == Format::GenCsv ? ',' : '\t'; }

std::string header_token(Format format, const ingest::DeclaredColumn& c) {
  switch (format) {
    case Format::IvmTxt: return c.name + " /" + c.unit;
    case Format::GenCsv: return c.unit.empty() ? c.name : c.name + " (" + c.unit + ")";
    default: return c.name;
  }
}

}  // namespace

std::string render_rows(Format format, const Table& table, std::size_t first, std::size_t last) {
  std::string out;
  const char sep = separator(format);
  for (std::size_t r = first; r < last; ++r) {
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (c) out += sep;
      out += format_decimal17(table[c][r]);
    }
    out += '\n';
  }
  return out;
}

std::string render_fixture(Format format, const ingest::FileMetadata& metadata, const Table& table) {
  std::string out;
  if (format == Format::McrTsv) {
    std::string today = format_iso_date(metadata.test_date);
    for (const auto& m : metadata.misc) {
      if (m.key == "todays_date") today = m.value_text;
    }
    out += "Today's Date\t" + today + "\n";
    out += "Date of Test\t" + format_iso_date(metadata.test_date) + "\n";
    out += "Dataset\t" + metadata.dataset_name + "\n";
  }
  const char sep = separator(format);
  for (std::size_t c = 0; c < metadata.declared_columns.size(); ++c) {
    if (c) out += sep;
    out += header_token(format, metadata.declared_columns[c]);
  }
  out += '\n';
  const auto rows = table.empty() ? 0 : table.front().size();
  return out + render_rows(format, table, 0, rows);
}

Table random_table(std::size_t columns, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-12, 12);
  Table table(columns, std::vector<double>(rows));
  for (auto& col : table) {
    for (auto& v : col) v = std::ldexp(mantissa(rng), exponent(rng));
  }
  return table;
}

ingest::FileMetadata sample_metadata(Format format, const std::string& dataset_name) {
  ingest::FileMetadata meta;
  meta.dataset_name = dataset_name;
  meta.dataset_type = std::string(ingest::tag(format));
  meta.test_date = Date{std::chrono::year{2020}, std::chrono::month{6}, std::chrono::day{1}};
  switch (format) {
    case Format::McrTsv:
      meta.declared_columns = {{"Rec#", "record_index", ""},
                               {"TestTime", "time", "s"},
                               {"Amps", "current", "A"},
                               {"Volts", "voltage", "V"}};
      meta.misc = {{"todays_date", "2020-06-02"}};
      break;
    case Format::IvmTxt:
      meta.declared_columns = {{"time", "time", "s"},
                               {"I", "current", "A"},
                               {"E", "voltage", "V"},
                               {"T", "temperature", "degC"}};
      break;
    case Format::GenCsv:
      meta.declared_columns = {{"t", "time", "s"},
                               {"V", "voltage", "V"},
                               {"I", "current", "A"},
                               {"Temp", "temperature", "degC"}};
      break;
    case Format::Unrecognized: break;
  }
  return meta;
}

}  // namespace galv::testing
