#include <gtest/gtest.h>

#include "galv/date.hpp"
#include "galv/sample_range.hpp"

namespace galv {
namespace {

TEST(SampleRangeTest, MakeRejectsReversedBounds) {
  EXPECT_THROW(SampleRange::make(50, 10), InvalidRange);
  EXPECT_EQ(SampleRange::make(3, 3).length(), 0);
  EXPECT_TRUE(SampleRange::make(3, 3).empty());
}

TEST(SampleRangeTest, HalfOpenMembership) {
  const SampleRange r{0, 100};
  EXPECT_TRUE(r.contains(0));
  EXPECT_TRUE(r.contains(99));
  EXPECT_FALSE(r.contains(100));
  EXPECT_EQ(r.length(), 100);
}

TEST(SampleRangeTest, IntersectDisjointIsEmpty) {
  EXPECT_EQ(intersect({0, 10}, {5, 20}), (SampleRange{5, 10}));
  EXPECT_TRUE(intersect({0, 10}, {20, 30}).empty());
}

TEST(DateTest, ParsesOnlyRealIsoDates) {
  auto d = parse_iso_date("2020-06-01");
  ASSERT_TRUE(d);
  EXPECT_EQ(format_iso_date(*d), "2020-06-01");
  EXPECT_FALSE(parse_iso_date("2021-02-30"));
  EXPECT_FALSE(parse_iso_date("2020-6-01"));
  EXPECT_FALSE(parse_iso_date("2020-06-01 "));
  EXPECT_FALSE(parse_iso_date(""));
}

}  // namespace
}  // namespace galv
