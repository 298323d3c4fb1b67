#include "galv/ingest/parser.hpp"
#include "text.hpp"

namespace galv::ingest {

std::string_view tag(Format format) noexcept {
  switch (format) {
    case Format::McrTsv: return "MCR-TSV";
    case Format::IvmTxt: return "IVM-TXT";
    case Format::GenCsv: return "GEN-CSV";
    case Format::Unrecognized: break;
  }
  return "Unrecognized";
}

std::optional<Format> format_from_tag(std::string_view name) noexcept {
  for (auto f : {Format::McrTsv, Format::IvmTxt, Format::GenCsv}) {
    if (tag(f) == name) return f;
  }
  return std::nullopt;
}

Format sniff(std::string_view first_bytes, std::string_view /*filename*/) {
  first_bytes.remove_prefix(text::bom_length(first_bytes));
  if (first_bytes.empty()) return Format::Unrecognized;
  for (const auto* parser : registered_parsers()) {
    if (parser->matches(first_bytes)) return parser->format();
  }
  return Format::Unrecognized;
}

Format sniff(std::span<const std::uint8_t> first_bytes, std::string_view filename) {
  return sniff(std::string_view(reinterpret_cast<const char*>(first_bytes.data()), first_bytes.size()),
               filename);
}

}  // namespace galv::ingest
