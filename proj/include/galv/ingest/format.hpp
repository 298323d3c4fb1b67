#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "galv/date.hpp"

namespace galv::ingest {

enum class Format { Unrecognized, McrTsv, IvmTxt, GenCsv };

/// "MCR-TSV", "IVM-TXT", "GEN-CSV" or "Unrecognized".
std::string_view tag(Format format) noexcept;
std::optional<Format> format_from_tag(std::string_view tag) noexcept;

/// Bytes sniff needs to decide; callers pass at least this much when available.
inline constexpr std::size_t kSniffBytes = 512;

struct DeclaredColumn {
  std::string name;
  std::string type_name;
  std::string unit;

  friend bool operator==(const DeclaredColumn&, const DeclaredColumn&) = default;
};

struct MiscEntry {
  std::string key;
  std::string value_text;

  friend bool operator==(const MiscEntry&, const MiscEntry&) = default;
};

struct FileMetadata {
  std::string dataset_name;
  Date test_date{};
  std::string dataset_type;
  std::vector<DeclaredColumn> declared_columns;
  std::vector<MiscEntry> misc;

  friend bool operator==(const FileMetadata&, const FileMetadata&) = default;
};

/// Rows first_sample_no .. first_sample_no + row_count() - 1, stored column-major.
struct RowBatch {
  std::int64_t first_sample_no = 0;
  std::vector<std::vector<double>> values_per_column;

  std::size_t row_count() const noexcept {
    return values_per_column.empty() ? 0 : values_per_column.front().size();
  }
};

struct ParseCursor {
  /// Absolute offset of the first unparsed byte in the file.
  std::uint64_t byte_offset = 0;
  std::int64_t rows_emitted = 0;

  friend bool operator==(const ParseCursor&, const ParseCursor&) = default;
};

/// What parse_header may need beyond the bytes: some formats take the
/// dataset name from the file name and the test date from its mtime.
struct SourceInfo {
  std::string filename;
  Date modified{};
};

enum class ParseErrc { MalformedHeader, MalformedRow };

struct ParseError {
  ParseErrc kind = ParseErrc::MalformedRow;
  std::uint64_t byte_offset = 0;
  std::string line;
  std::string reason;

  std::string describe() const;
};

class ParseFailure : public std::runtime_error {
 public:
  explicit ParseFailure(ParseError error);
  const ParseError& error() const noexcept { return error_; }

 private:
  ParseError error_;
};

struct HeaderResult {
  FileMetadata metadata;
  ParseCursor cursor;
};

struct RowsResult {
  std::vector<RowBatch> batches;
  ParseCursor cursor;
  /// Set when parsing stopped at a bad row; batches before it stay valid.
  std::optional<ParseError> error;

  std::size_t row_count() const noexcept;
};

struct RowLimits {
  /// Stop after this many rows in total.
  std::size_t max_rows = std::numeric_limits<std::size_t>::max();
  /// Rows per emitted batch.
  std::size_t batch_rows = 4096;
};

/// Pure format detection over the file's first bytes. The file name is
/// accepted for interface stability but does not influence the decision.
Format sniff(std::span<const std::uint8_t> first_bytes, std::string_view filename = {});
Format sniff(std::string_view first_bytes, std::string_view filename = {});

/// Throws ParseFailure (MalformedHeader) with the offending offset.
HeaderResult parse_header(Format format, std::string_view content_prefix,
                          const SourceInfo& source = {});

/// Parses complete lines of `bytes`, which hold the file starting at
/// cursor.byte_offset. An unterminated trailing line is left unconsumed.
RowsResult parse_rows(Format format, const FileMetadata& metadata, ParseCursor cursor,
                      std::string_view bytes, RowLimits limits = {});

/// (type_name, unit) for a source column name; ("unknown", "") if unmatched.
struct ColumnMapping {
  std::string type_name;
  std::string unit;

  friend bool operator==(const ColumnMapping&, const ColumnMapping&) = default;
};

ColumnMapping map_column(std::string_view source_name);

/// Column type implied by a declared unit ("V" -> voltage), if any.
std::optional<std::string> type_for_unit(std::string_view unit);

}  // namespace galv::ingest
