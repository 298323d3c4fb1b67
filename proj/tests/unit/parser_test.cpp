#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "galv/ingest/format.hpp"
#include "galv/ingest/parser.hpp"
#include "support/fixtures.hpp"

namespace galv::ingest {
namespace {

using testing::Table;

Date ymd(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

const SourceInfo kSource{"/data/cell_07.txt", ymd(2021, 3, 4)};

Table flatten(const std::vector<RowBatch>& batches, std::size_t columns) {
  Table out(columns);
  for (const auto& b : batches) {
    for (std::size_t c = 0; c < columns; ++c) {
      out[c].insert(out[c].end(), b.values_per_column[c].begin(), b.values_per_column[c].end());
    }
  }
  return out;
}

bool bit_equal(const Table& a, const Table& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c].size() != b[c].size()) return false;
    for (std::size_t r = 0; r < a[c].size(); ++r) {
      if (std::bit_cast<std::uint64_t>(a[c][r]) != std::bit_cast<std::uint64_t>(b[c][r])) return false;
    }
  }
  return true;
}

TEST(ParseHeaderTest, MaccorColumnsAreTyped) {
  const std::string text =
      "Today's Date\t2020-06-02\nDate of Test\t2020-06-01\nDataset\tcellA_rate_test\n"
      "Rec#\tTestTime\tAmps\tVolts\n1\t0\t0.5\t3.6\n";
  const auto header = parse_header(Format::McrTsv, text);
  const auto& cols = header.metadata.declared_columns;
  ASSERT_EQ(cols.size(), 4u);
  EXPECT_EQ(cols[2], (DeclaredColumn{"Amps", "current", "A"}));
  EXPECT_EQ(cols[3], (DeclaredColumn{"Volts", "voltage", "V"}));
  EXPECT_EQ(header.metadata.dataset_name, "cellA_rate_test");
  EXPECT_EQ(header.metadata.test_date, ymd(2020, 6, 1));
  EXPECT_EQ(header.metadata.dataset_type, "MCR-TSV");
  EXPECT_EQ(header.cursor.byte_offset, text.find("1\t0\t"));
  EXPECT_EQ(header.cursor.rows_emitted, 0);
}

TEST(ParseHeaderTest, TruncatedMidLineReportsTruncationOffset) {
  const std::string text = "Today's Date\t2020-06-02\nDate of Test\t2020-0";
  try {
    parse_header(Format::McrTsv, text);
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.error().kind, ParseErrc::MalformedHeader);
    EXPECT_EQ(e.error().byte_offset, text.size());
  }
}

TEST(ParseHeaderTest, MaccorBadDateRejected) {
  const std::string text = "Today's Date\t2020-06-02\nDate of Test\tyesterday\nDataset\tx\nVolts\n";
  try {
    parse_header(Format::McrTsv, text);
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.error().byte_offset, text.find("Date of Test"));
  }
}

TEST(ParseHeaderTest, GenericCsvUnitsFromParentheses) {
  const auto header = parse_header(Format::GenCsv, "t (s),V (V)\n0,3.6\n", kSource);
  EXPECT_EQ(header.metadata.declared_columns,
            (std::vector<DeclaredColumn>{{"t", "time", "s"}, {"V", "voltage", "V"}}));
  EXPECT_EQ(header.metadata.dataset_name, "cell_07");
  EXPECT_EQ(header.metadata.test_date, kSource.modified);
}

TEST(ParseHeaderTest, IviumTokensAndRecordedUnits) {
  const auto header =
      parse_header(Format::IvmTxt, "time /s\tI /mA\tE /V\tFooBar /xyz\n", kSource);
  EXPECT_EQ(header.metadata.declared_columns,
            (std::vector<DeclaredColumn>{{"time", "time", "s"},
                                         {"I", "current", "mA"},
                                         {"E", "voltage", "V"},
                                         {"FooBar", "unknown", "xyz"}}));
}

TEST(ParseHeaderTest, DuplicateColumnNamesRejected) {
  EXPECT_THROW(parse_header(Format::GenCsv, "a,a\n", kSource), ParseFailure);
}

TEST(ParseHeaderTest, BomCountsTowardsOffset) {
  const std::string text = "\xEF\xBB\xBFt (s),V (V)\n0,1\n";
  const auto header = parse_header(Format::GenCsv, text, kSource);
  EXPECT_EQ(header.cursor.byte_offset, text.find("0,1"));
}

class ParseRowsTest : public ::testing::Test {
 protected:
  FileMetadata meta = parse_header(Format::GenCsv, "t (s),V (V)\n", kSource).metadata;
  ParseCursor start{12, 0};
};

TEST_F(ParseRowsTest, PartialTrailingLineIsNotConsumed) {
  const std::string rows = "0,3.6\n1,3.7\n2,3.8\n3,3.";
  auto first = parse_rows(Format::GenCsv, meta, start, rows);
  EXPECT_FALSE(first.error);
  EXPECT_EQ(first.row_count(), 3u);
  EXPECT_EQ(first.cursor.byte_offset, start.byte_offset + rows.find("3,3."));
  EXPECT_EQ(first.cursor.rows_emitted, 3);

  const std::string completed = rows + "9000000\n";
  ASSERT_EQ(completed.size() - rows.size(), 8u);
  const auto tail = std::string_view(completed).substr(first.cursor.byte_offset - start.byte_offset);
  auto second = parse_rows(Format::GenCsv, meta, first.cursor, tail);
  ASSERT_EQ(second.row_count(), 1u);
  EXPECT_EQ(second.cursor.rows_emitted, 4);
  EXPECT_EQ(second.batches[0].first_sample_no, 3);
  EXPECT_EQ(second.batches[0].values_per_column[1][0], 3.9);

  const auto whole = parse_rows(Format::GenCsv, meta, start, completed);
  EXPECT_EQ(whole.cursor, second.cursor);
}

TEST_F(ParseRowsTest, MalformedRowQuotesLine) {
  const std::string rows = "0,3.6\n1,abc\n2,3.8\n";
  const auto result = parse_rows(Format::GenCsv, meta, start, rows);
  ASSERT_TRUE(result.error);
  EXPECT_EQ(result.error->kind, ParseErrc::MalformedRow);
  EXPECT_EQ(result.error->line, "1,abc");
  EXPECT_EQ(result.error->byte_offset, start.byte_offset + 6);
  EXPECT_EQ(result.row_count(), 1u);
  EXPECT_EQ(result.cursor.byte_offset, start.byte_offset + 6);
}

TEST_F(ParseRowsTest, ThousandsSeparatorAndFieldCount) {
  EXPECT_TRUE(parse_rows(Format::GenCsv, meta, start, "1,000.5,1\n").error);
  EXPECT_TRUE(parse_rows(Format::GenCsv, meta, start, "1\n").error);
  EXPECT_TRUE(parse_rows(Format::GenCsv, meta, start, "1,\n").error);
}

TEST_F(ParseRowsTest, CrLfBlankLinesAndSpecials) {
  const auto result = parse_rows(Format::GenCsv, meta, start, "0,NaN\r\n\r\n1,-Inf\r\n2, inf\n");
  ASSERT_FALSE(result.error);
  ASSERT_EQ(result.row_count(), 3u);
  const auto table = flatten(result.batches, 2);
  EXPECT_TRUE(std::isnan(table[1][0]));
  EXPECT_EQ(table[1][1], -std::numeric_limits<double>::infinity());
  EXPECT_EQ(table[1][2], std::numeric_limits<double>::infinity());
}

TEST_F(ParseRowsTest, LimitsSplitBatches) {
  std::string rows;
  for (int i = 0; i < 10; ++i) rows += std::to_string(i) + ",1\n";
  const auto limited = parse_rows(Format::GenCsv, meta, start, rows, {7, 3});
  ASSERT_EQ(limited.batches.size(), 3u);
  EXPECT_EQ(limited.batches[2].row_count(), 1u);
  EXPECT_EQ(limited.batches[2].first_sample_no, 6);
  EXPECT_EQ(limited.cursor.rows_emitted, 7);
}

TEST(RoundTripTest, EveryFormatReproducesMetadataAndValues) {
  std::uint64_t seed = 100;
  for (auto f : {Format::McrTsv, Format::IvmTxt, Format::GenCsv}) {
    auto meta = testing::sample_metadata(f, "cell_07");
    if (f != Format::McrTsv) meta.test_date = kSource.modified;
    const auto table = testing::random_table(4, 257, seed++);
    const auto text = testing::render_fixture(f, meta, table);
    ASSERT_EQ(sniff(std::string_view(text).substr(0, kSniffBytes)), f);
    const auto header = parse_header(f, text, kSource);
    EXPECT_EQ(header.metadata, meta) << tag(f);
    const auto rows = parse_rows(f, header.metadata, header.cursor,
                                 std::string_view(text).substr(header.cursor.byte_offset));
    ASSERT_FALSE(rows.error);
    EXPECT_TRUE(bit_equal(flatten(rows.batches, 4), table)) << tag(f);
    EXPECT_EQ(rows.cursor.byte_offset, text.size());
  }
}

TEST(ChunkingTest, AnySplitEqualsSingleShot) {
  std::mt19937_64 rng(7);
  for (auto f : {Format::McrTsv, Format::IvmTxt, Format::GenCsv}) {
    const auto table = testing::random_table(4, 120, rng());
    const auto text = testing::render_fixture(f, testing::sample_metadata(f, "x"), table);
    const auto header = parse_header(f, text, kSource);
    const auto single = parse_rows(f, header.metadata, header.cursor,
                                   std::string_view(text).substr(header.cursor.byte_offset));
    for (int trial = 0; trial < 50; ++trial) {
      // The file grows in random steps; each parse sees everything written so far.
      std::vector<RowBatch> batches;
      auto cursor = header.cursor;
      std::size_t written = header.cursor.byte_offset;
      while (written < text.size()) {
        written = std::min(text.size(),
                           written + std::uniform_int_distribution<std::size_t>(1, 400)(rng));
        const auto visible = std::string_view(text).substr(0, written).substr(cursor.byte_offset);
        auto step = parse_rows(f, header.metadata, cursor, visible);
        ASSERT_FALSE(step.error);
        for (auto& b : step.batches) batches.push_back(std::move(b));
        ASSERT_GE(step.cursor.byte_offset, cursor.byte_offset);
        cursor = step.cursor;
      }
      EXPECT_EQ(cursor, single.cursor);
      EXPECT_TRUE(bit_equal(flatten(batches, 4), flatten(single.batches, 4)));
      // Sample numbers are dense 0..N-1 in order.
      std::int64_t next = 0;
      for (const auto& b : batches) {
        ASSERT_EQ(b.first_sample_no, next);
        next += static_cast<std::int64_t>(b.row_count());
      }
      EXPECT_EQ(next, 120);
    }
  }
}

}  // namespace
}  // namespace galv::ingest
