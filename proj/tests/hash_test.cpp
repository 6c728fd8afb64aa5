#include <gtest/gtest.h>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"

using namespace lcaas;

// Expected digests come from sha256sum (see tests/oracles/golden.py).
TEST(ComputeHash, EmptyInput) {
  EXPECT_EQ(compute_hash("").str(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(ComputeHash, Abc) {
  EXPECT_EQ(compute_hash("abc").str(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ComputeHash, AlwaysSixtyFourLowercaseHex) {
  std::string input;
  for (int i = 0; i < 200; ++i) {
    input += static_cast<char>(i);
    const auto h = compute_hash(input);
    EXPECT_EQ(h.str().size(), 64u);
    EXPECT_TRUE(HexDigest::is_valid(h.str()));
  }
}

TEST(ComputeHash, ByteSpanMatchesString) {
  const std::uint8_t bytes[] = {'a', 'b', 'c'};
  EXPECT_EQ(compute_hash(std::span<const std::uint8_t>(bytes)), compute_hash("abc"));
}

TEST(HexDigest, ZeroHash) {
  EXPECT_EQ(HexDigest::zero().str(), std::string(64, '0'));
  EXPECT_TRUE(HexDigest::zero().is_zero());
  EXPECT_FALSE(compute_hash("abc").is_zero());
}

TEST(HexDigest, RejectsNonCanonicalText) {
  const std::string ok(64, 'a');
  EXPECT_TRUE(HexDigest::parse(ok).has_value());
  EXPECT_FALSE(HexDigest::parse(std::string(63, 'a')).has_value());
  EXPECT_FALSE(HexDigest::parse(std::string(65, 'a')).has_value());
  EXPECT_FALSE(HexDigest::parse(std::string(64, 'A')).has_value());
  EXPECT_FALSE(HexDigest::parse(std::string(63, 'a') + "g").has_value());
  EXPECT_THROW(HexDigest::from_string("xyz"), Error);
}

TEST(MeetsDifficulty, PrefixInspection) {
  const auto h = HexDigest::from_string("0ab" + std::string(61, '1'));
  EXPECT_TRUE(meets_difficulty(h, 0));
  EXPECT_TRUE(meets_difficulty(h, 1));
  EXPECT_FALSE(meets_difficulty(h, 2));
  EXPECT_TRUE(meets_difficulty(HexDigest::zero(), 8));
  EXPECT_TRUE(meets_difficulty(HexDigest::zero(), 64));
  EXPECT_FALSE(meets_difficulty(HexDigest::zero(), 65));
}

TEST(MeetsDifficulty, ZeroDifficultyAcceptsEverything) {
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(meets_difficulty(compute_hash(std::to_string(i)), 0));
}

TEST(HashCounter, CountsEvaluations) {
  HashCounter h;
  EXPECT_EQ(h("abc"), compute_hash("abc"));
  h("");
  EXPECT_EQ(h.count(), 2u);
}
