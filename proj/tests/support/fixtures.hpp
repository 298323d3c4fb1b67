#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "galv/ingest/format.hpp"

namespace galv::testing {

/// Column-major numeric table: columns[c][row].
using Table = std::vector<std::vector<double>>;

/// Renders a file in `format` whose parse yields `metadata` and `table`.
/// Dates and names for IVM-TXT/GEN-CSV come from the file name and mtime,
/// so only the columns matter for them. Values are written with 17
/// significant digits; every line is newline-terminated.
std::string render_fixture(ingest::Format format, const ingest::FileMetadata& metadata,
                           const Table& table);

/// Only the data rows in [first, last) of `table`, formatted for `format`.
std::string render_rows(ingest::Format format, const Table& table, std::size_t first,
                        std::size_t last);

/// Seeded table of finite doubles spanning many magnitudes and signs.
Table random_table(std::size_t columns, std::size_t rows, std::uint64_t seed);

/// Four-column metadata sample for each format (declared types resolved the
/// way the parser will resolve them).
ingest::FileMetadata sample_metadata(ingest::Format format, const std::string& dataset_name);

}  // namespace galv::testing
