#include "ue/bits.hpp"
#include "ue/exact_sum.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

using ue::BitString;

TEST(BitString, BigEndianIntegerView) {
  auto s = BitString::from_uint(0b0110, 4);
  EXPECT_EQ(s.to_string(), "0110");
  EXPECT_FALSE(s[0]);
  EXPECT_TRUE(s[1]);
  EXPECT_EQ(s.to_uint(), 6u);
  EXPECT_THROW(BitString::from_uint(16, 4), ue::DimensionError);
}

TEST(BitString, XorRequiresEqualLengths) {
  auto a = BitString::from_uint(3, 2);
  auto b = BitString::from_uint(1, 3);
  EXPECT_THROW(a ^ b, ue::DimensionError);
  EXPECT_EQ((a ^ BitString::from_uint(1, 2)).to_uint(), 2u);
}

TEST(BitString, HexRoundTripProperty) {
  ue::Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t len = rng.below(200);
    auto s = BitString::random(len, rng);
    auto hex = s.to_hex();
    EXPECT_EQ(hex.size(), (len + 3) / 4);
    EXPECT_EQ(BitString::from_hex(hex, len), s);
  }
}

TEST(BitString, HexRejectsGarbage) {
  EXPECT_THROW(BitString::from_hex("zz", 8), ue::DecodeError);
  EXPECT_THROW(BitString::from_hex("f", 3), ue::DecodeError);  // padding bit set
  EXPECT_THROW(BitString::from_hex("0", 8), ue::DecodeError);
  EXPECT_EQ(BitString::from_hex("7", 3).to_string(), "111");
}

TEST(BitString, SliceAndConcat) {
  auto s = BitString::parse_binary("1011001");
  EXPECT_EQ(s.slice(2, 3).to_string(), "110");
  EXPECT_EQ(s.slice(0, 2).concat(s.slice(2, 5)), s);
  EXPECT_THROW(s.slice(5, 3), ue::DimensionError);
}

TEST(ExactSum, OrderIndependent) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> terms;
  for (int i = 0; i < 2000; ++i) terms.push_back(dist(gen) * std::pow(10.0, (i % 7) - 3));
  terms.push_back(1e16);
  terms.push_back(-1e16);
  ue::ExactSum forward;
  for (double t : terms) forward += t;
  for (int shuffle = 0; shuffle < 20; ++shuffle) {
    std::shuffle(terms.begin(), terms.end(), gen);
    ue::ExactSum s;
    for (double t : terms) s += t;
    EXPECT_EQ(s.value(), forward.value());
  }
}

TEST(ExactSum, CorrectlyRounded) {
  ue::ExactSum s;
  for (int i = 0; i < 10; ++i) s += 0.1;
  EXPECT_EQ(s.value(), 1.0);
  ue::ExactSum t;
  t += 1e100;
  t += 1.0;
  t += -1e100;
  EXPECT_EQ(t.value(), 1.0);
}

TEST(BitString, ByteRoundTrip) {
  auto s = BitString::parse_binary("1011010011");
  auto bytes = s.to_bytes();
  ASSERT_EQ(bytes.size(), 2u);
  EXPECT_EQ(bytes[0], 0x02);
  EXPECT_EQ(bytes[1], 0xd3);
  EXPECT_EQ(BitString::from_bytes(bytes, 10), s);
  EXPECT_THROW(BitString::from_bytes(bytes, 9), ue::DecodeError);
}
