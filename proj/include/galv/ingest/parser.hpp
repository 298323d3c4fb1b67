#pragma once

#include <span>
#include <string_view>

#include "galv/ingest/format.hpp"

namespace galv::ingest {

/// One vendor format. New formats implement this and register in
/// registered_parsers(); sniff asks them in order.
class FormatParser {
 public:
  virtual ~FormatParser() = default;

  virtual Format format() const noexcept = 0;
  /// `first_bytes` has any UTF-8 BOM already removed.
  virtual bool matches(std::string_view first_bytes) const = 0;
  /// `prefix` starts after any BOM; offsets in the result are relative to it.
  virtual HeaderResult parse_header(std::string_view prefix, const SourceInfo& source) const = 0;
  virtual char field_separator() const noexcept = 0;
};

/// Parsers in sniff precedence order.
std::span<const FormatParser* const> registered_parsers();
const FormatParser& parser_for(Format format);

}  // namespace galv::ingest
