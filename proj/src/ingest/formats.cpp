#include <array>
#include <filesystem>

#include "galv/ingest/parser.hpp"
#include "text.hpp"

namespace galv::ingest {

namespace {

[[noreturn]] void malformed_header(std::size_t offset, std::string_view line, std::string reason) {
  throw ParseFailure(
      ParseError{ParseErrc::MalformedHeader, offset, std::string(line), std::move(reason)});
}

text::Line require_line(std::string_view prefix, std::size_t offset, const char* what) {
  auto line = text::next_line(prefix, offset);
  if (!line) {
    malformed_header(prefix.size(), prefix.substr(std::min(offset, prefix.size())),
                     std::string("header truncated in ") + what);
  }
  return *line;
}

DeclaredColumn declare(std::string_view name, std::string_view file_unit) {
  auto mapping = map_column(name);
  DeclaredColumn column{std::string(name), mapping.type_name, mapping.unit};
  if (!file_unit.empty()) {
    // Units are recorded as the file states them, never converted.
    column.unit = std::string(file_unit);
    if (column.type_name == "unknown") {
      if (auto inferred = type_for_unit(file_unit)) column.type_name = *inferred;
    }
  }
  return column;
}

void check_unique(const std::vector<DeclaredColumn>& columns, std::size_t offset,
                  std::string_view line) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      if (columns[i].name == columns[j].name) {
        malformed_header(offset, line, "duplicate column name " + columns[i].name);
      }
    }
  }
}

// Header tokens visible in the sniff window. When the window ends inside
// the first line the last token may be cut short, so it is ignored.
std::vector<std::string_view> sniff_tokens(std::string_view first_bytes, char separator) {
  const bool terminated = first_bytes.find('\n') != std::string_view::npos;
  auto tokens = text::split(text::first_line(first_bytes), separator);
  if (!terminated && tokens.size() > 1) tokens.pop_back();
  return tokens;
}

std::string stem_of(const std::string& filename) {
  auto stem = std::filesystem::path(filename).stem().string();
  return stem.empty() ? filename : stem;
}

// Maccor-like: four header lines (dates, dataset name, column names).
class McrTsvParser final : public FormatParser {
 public:
  static constexpr std::string_view kTodayKey = "Today's Date\t";
  static constexpr std::string_view kTestKey = "Date of Test\t";
  static constexpr std::string_view kDatasetKey = "Dataset\t";

  Format format() const noexcept override { return Format::McrTsv; }
  char field_separator() const noexcept override { return '\t'; }

  bool matches(std::string_view first_bytes) const override {
    return first_bytes.starts_with(kTodayKey);
  }

  HeaderResult parse_header(std::string_view prefix, const SourceInfo&) const override {
    HeaderResult result;
    auto& meta = result.metadata;
    meta.dataset_type = std::string(tag(Format::McrTsv));

    std::size_t offset = 0;
    const auto today = require_line(prefix, offset, "Today's Date line");
    const auto today_value = keyed_value(today.content, kTodayKey, offset);
    if (!parse_iso_date(today_value)) malformed_header(offset, today.content, "invalid Today's Date");
    meta.misc.push_back({"todays_date", std::string(today_value)});
    offset = today.next;

    const auto test = require_line(prefix, offset, "Date of Test line");
    const auto test_value = keyed_value(test.content, kTestKey, offset);
    auto test_date = parse_iso_date(test_value);
    if (!test_date) malformed_header(offset, test.content, "invalid Date of Test");
    meta.test_date = *test_date;
    offset = test.next;

    const auto name = require_line(prefix, offset, "Dataset line");
    const auto name_value = keyed_value(name.content, kDatasetKey, offset);
    if (name_value.empty()) malformed_header(offset, name.content, "empty dataset name");
    meta.dataset_name = std::string(name_value);
    offset = name.next;

    const auto columns = require_line(prefix, offset, "column name line");
    for (auto token : text::split(columns.content, '\t')) {
      token = text::trim(token);
      if (token.empty()) malformed_header(offset, columns.content, "empty column name");
      meta.declared_columns.push_back(declare(token, {}));
    }
    check_unique(meta.declared_columns, offset, columns.content);
    result.cursor.byte_offset = columns.next;
    return result;
  }

 private:
  static std::string_view keyed_value(std::string_view line, std::string_view key,
                                      std::size_t offset) {
    if (!line.starts_with(key)) {
      malformed_header(offset, line, "expected '" + std::string(key.substr(0, key.size() - 1)) + "'");
    }
    return text::trim(line.substr(key.size()));
  }
};

// Ivium-like: one header line of "name /unit" tokens.
class IvmTxtParser final : public FormatParser {
 public:
  Format format() const noexcept override { return Format::IvmTxt; }
  char field_separator() const noexcept override { return '\t'; }

  bool matches(std::string_view first_bytes) const override {
    if (text::trim(text::first_line(first_bytes)).empty()) return false;
    for (auto token : sniff_tokens(first_bytes, '\t')) {
      if (!text::split_slash_unit(token)) return false;
    }
    return true;
  }

  HeaderResult parse_header(std::string_view prefix, const SourceInfo& source) const override {
    HeaderResult result;
    auto& meta = result.metadata;
    meta.dataset_type = std::string(tag(Format::IvmTxt));
    meta.dataset_name = stem_of(source.filename);
    meta.test_date = source.modified;
    const auto header = require_line(prefix, 0, "column header line");
    for (auto token : text::split(header.content, '\t')) {
      auto parts = text::split_slash_unit(token);
      if (!parts) malformed_header(0, header.content, "column token is not 'name /unit'");
      meta.declared_columns.push_back(declare(parts->name, parts->unit));
    }
    check_unique(meta.declared_columns, 0, header.content);
    result.cursor.byte_offset = header.next;
    return result;
  }
};

// Generic CSV: one header line of "name" or "name (unit)" tokens.
class GenCsvParser final : public FormatParser {
 public:
  Format format() const noexcept override { return Format::GenCsv; }
  char field_separator() const noexcept override { return ','; }

  bool matches(std::string_view first_bytes) const override {
    if (text::split(text::first_line(first_bytes), ',').size() < 2) return false;
    const auto tokens = sniff_tokens(first_bytes, ',');
    for (auto token : tokens) {
      if (!text::split_paren_unit(token)) return false;
    }
    return true;
  }

  HeaderResult parse_header(std::string_view prefix, const SourceInfo& source) const override {
    HeaderResult result;
    auto& meta = result.metadata;
    meta.dataset_type = std::string(tag(Format::GenCsv));
    meta.dataset_name = stem_of(source.filename);
    meta.test_date = source.modified;
    const auto header = require_line(prefix, 0, "column header line");
    for (auto token : text::split(header.content, ',')) {
      auto parts = text::split_paren_unit(token);
      if (!parts) malformed_header(0, header.content, "column token is not 'name (unit)'");
      meta.declared_columns.push_back(declare(parts->name, parts->unit));
    }
    check_unique(meta.declared_columns, 0, header.content);
    result.cursor.byte_offset = header.next;
    return result;
  }
};

const McrTsvParser kMcr;
const IvmTxtParser kIvm;
const GenCsvParser kGen;
const std::array<const FormatParser*, 3> kRegistry{&kMcr, &kIvm, &kGen};

}  // namespace

std::span<const FormatParser* const> registered_parsers() { return kRegistry; }

const FormatParser& parser_for(Format format) {
  for (const auto* p : kRegistry) {
    if (p->format() == format) return *p;
  }
  throw std::invalid_argument("no parser for format " + std::string(tag(format)));
}

}  // namespace galv::ingest
