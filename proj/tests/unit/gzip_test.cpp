#include <gtest/gtest.h>

#include <random>

#include "galv/api/gzip.hpp"

namespace galv::api {
namespace {

TEST(GzipTest, RoundTripsEmptyAndRandomPayloads) {
  EXPECT_EQ(gzip_decompress(gzip_compress("")), "");
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 17u, 4096u, 100000u}) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(rng());
    EXPECT_EQ(gzip_decompress(gzip_compress(s)), s) << n;
  }
}

TEST(GzipTest, OutputIsAGzipMember) {
  auto z = gzip_compress("hello");
  ASSERT_GE(z.size(), 18u);
  EXPECT_EQ(static_cast<unsigned char>(z[0]), 0x1f);
  EXPECT_EQ(static_cast<unsigned char>(z[1]), 0x8b);
}

TEST(GzipTest, ConcatenatedMembersInflateToConcatenation) {
  EXPECT_EQ(gzip_decompress(gzip_compress("abc") + gzip_compress("def")), "abcdef");
}

TEST(GzipTest, CorruptOrTruncatedInputThrows) {
  auto z = gzip_compress(std::string(1000, 'x'));
  EXPECT_THROW(gzip_decompress(z.substr(0, z.size() / 2)), std::runtime_error);
  EXPECT_THROW(gzip_decompress("not gzip at all"), std::runtime_error);
}

TEST(GzipTest, AcceptEncodingNegotiation) {
  EXPECT_TRUE(accepts_gzip("gzip"));
  EXPECT_TRUE(accepts_gzip("deflate, gzip;q=0.5"));
  EXPECT_TRUE(accepts_gzip(" GZIP "));
  EXPECT_TRUE(accepts_gzip("*"));
  EXPECT_FALSE(accepts_gzip(""));
  EXPECT_FALSE(accepts_gzip("br, deflate"));
  EXPECT_FALSE(accepts_gzip("gzip;q=0"));
  EXPECT_FALSE(accepts_gzip("gzip;q=0.0, identity"));
}

}  // namespace
}  // namespace galv::api
