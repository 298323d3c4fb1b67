#include <gtest/gtest.h>

#include "galv/ingest/format.hpp"
#include "support/fixtures.hpp"

namespace galv::ingest {
namespace {

TEST(SniffTest, MaccorPrefix) {
  EXPECT_EQ(sniff(std::string_view("Today's Date\t2020-06-01\nDate of Test\t2020-06-01\n")),
            Format::McrTsv);
}

TEST(SniffTest, EmptyIsUnrecognized) {
  EXPECT_EQ(sniff(std::string_view("")), Format::Unrecognized);
  EXPECT_EQ(sniff(std::span<const std::uint8_t>{}), Format::Unrecognized);
}

TEST(SniffTest, IviumTokens) {
  EXPECT_EQ(sniff(std::string_view("time /s\tI /A\tE /V\n0\t0.1\t3.6\n")), Format::IvmTxt);
}

TEST(SniffTest, GenericCsvTokens) {
  EXPECT_EQ(sniff(std::string_view("t (s),V (V)\n0,3.6\n")), Format::GenCsv);
  EXPECT_EQ(sniff(std::string_view("sample_no,Volts (V),Amps (A)\r\n")), Format::GenCsv);
}

TEST(SniffTest, UnrecognizedInputs) {
  EXPECT_EQ(sniff(std::string_view("0,1,2\n3,4,5\n")), Format::Unrecognized);
  EXPECT_EQ(sniff(std::string_view("hello world\n")), Format::Unrecognized);
  EXPECT_EQ(sniff(std::string_view("time /s\t0.1\n")), Format::Unrecognized);
  EXPECT_EQ(sniff(std::string_view("\x89PNG\r\n\x1a\n")), Format::Unrecognized);
  EXPECT_EQ(sniff(std::string_view("Today's Date 2020\n")), Format::Unrecognized);
}

TEST(SniffTest, BomIsSkipped) {
  EXPECT_EQ(sniff(std::string_view("\xEF\xBB\xBFtime /s\tE /V\n")), Format::IvmTxt);
  EXPECT_EQ(sniff(std::string_view("\xEF\xBB\xBF")), Format::Unrecognized);
}

TEST(SniffTest, HeaderLongerThanWindowStillSniffs) {
  std::string header;
  for (int i = 0; i < 80; ++i) header += (i ? "\t" : "") + std::string("col") + std::to_string(i) + " /V";
  EXPECT_EQ(sniff(std::string_view(header).substr(0, kSniffBytes)), Format::IvmTxt);
}

TEST(SniffTest, DeterministicOverGeneratedFixtures) {
  const auto table = testing::random_table(4, 20, 1);
  for (auto f : {Format::McrTsv, Format::IvmTxt, Format::GenCsv}) {
    const auto text = testing::render_fixture(f, testing::sample_metadata(f, "x"), table);
    const auto window = std::string_view(text).substr(0, kSniffBytes);
    EXPECT_EQ(sniff(window, "a.txt"), f) << tag(f);
    EXPECT_EQ(sniff(window, "different-name.csv"), f);
  }
}

TEST(SniffTest, TagsRoundTrip) {
  for (auto f : {Format::McrTsv, Format::IvmTxt, Format::GenCsv}) {
    EXPECT_EQ(format_from_tag(tag(f)), f);
  }
  EXPECT_FALSE(format_from_tag("Unrecognized"));
}

}  // namespace
}  // namespace galv::ingest
