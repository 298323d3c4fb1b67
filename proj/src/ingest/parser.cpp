#include "galv/ingest/parser.hpp"

#include "galv/decimal.hpp"
#include "text.hpp"

namespace galv::ingest {

std::string ParseError::describe() const {
  std::string out = kind == ParseErrc::MalformedHeader ? "MalformedHeader" : "MalformedRow";
  out += " at byte " + std::to_string(byte_offset) + ": " + reason;
  if (!line.empty()) out += " (line: \"" + line + "\")";
  return out;
}

ParseFailure::ParseFailure(ParseError error)
    : std::runtime_error(error.describe()), error_(std::move(error)) {}

std::size_t RowsResult::row_count() const noexcept {
  std::size_t total = 0;
  for (const auto& b : batches) total += b.row_count();
  return total;
}

HeaderResult parse_header(Format format, std::string_view content_prefix, const SourceInfo& source) {
  if (format == Format::Unrecognized) {
    throw ParseFailure(ParseError{ParseErrc::MalformedHeader, 0, {}, "format not recognized"});
  }
  const auto bom = text::bom_length(content_prefix);
  try {
    auto result = parser_for(format).parse_header(content_prefix.substr(bom), source);
    result.cursor.byte_offset += bom;
    if (result.metadata.declared_columns.empty()) {
      throw ParseFailure(ParseError{ParseErrc::MalformedHeader, bom, {}, "no columns declared"});
    }
    return result;
  } catch (ParseFailure& failure) {
    auto error = failure.error();
    if (bom != 0 && error.byte_offset != 0) error.byte_offset += bom;
    throw ParseFailure(std::move(error));
  }
}

RowsResult parse_rows(Format format, const FileMetadata& metadata, ParseCursor cursor,
                      std::string_view bytes, RowLimits limits) {
  const char separator = parser_for(format).field_separator();
  const auto columns = metadata.declared_columns.size();
  if (limits.batch_rows == 0) limits.batch_rows = 1;

  RowsResult result;
  result.cursor = cursor;
  RowBatch batch;
  auto flush = [&] {
    if (batch.row_count() > 0) result.batches.push_back(std::move(batch));
    batch = RowBatch{};
  };
  auto start_batch = [&] {
    batch.first_sample_no = result.cursor.rows_emitted;
    batch.values_per_column.assign(columns, {});
  };

  std::size_t offset = 0;
  std::size_t rows = 0;
  start_batch();
  std::vector<double> row(columns);
  while (rows < limits.max_rows) {
    auto line = text::next_line(bytes, offset);
    if (!line) break;
    const auto row_offset = cursor.byte_offset + offset;
    if (text::trim(line->content).empty()) {
      // Blank lines carry no sample.
      offset = line->next;
      result.cursor.byte_offset = cursor.byte_offset + offset;
      continue;
    }
    const auto fields = text::split(line->content, separator);
    std::string reason;
    if (fields.size() != columns) {
      reason = "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size());
    } else {
      for (std::size_t c = 0; c < columns; ++c) {
        auto value = parse_decimal(text::trim(fields[c]));
        if (!value) {
          reason = "field " + std::to_string(c + 1) + " is not a decimal number: '" +
                   std::string(text::trim(fields[c])) + "'";
          break;
        }
        row[c] = *value;
      }
    }
    if (!reason.empty()) {
      result.error = ParseError{ParseErrc::MalformedRow, row_offset, std::string(line->content), reason};
      break;
    }
    for (std::size_t c = 0; c < columns; ++c) batch.values_per_column[c].push_back(row[c]);
    offset = line->next;
    ++rows;
    ++result.cursor.rows_emitted;
    result.cursor.byte_offset = cursor.byte_offset + offset;
    if (batch.row_count() == limits.batch_rows) {
      flush();
      start_batch();
    }
  }
  flush();
  return result;
}

}  // namespace galv::ingest
