#include <gtest/gtest.h>

#include <random>
#include <set>

#include "wegnerlab/random.hpp"

using namespace wegnerlab;

namespace {

using Block = std::array<std::uint32_t, 4>;

TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

static_assert(std::uniform_random_bit_generator<CounterStream>);

TEST(CounterStream, SameKeySameSequence) {
  CounterStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(CounterStream, DrawIsPureFunctionOfIndex) {
  // Draw i of a stream does not depend on other streams being used.
  CounterStream lone(9, 3);
  std::vector<std::uint64_t> expected;
  for (int i = 0; i < 64; ++i) expected.push_back(lone());
  CounterStream other(9, 2), again(9, 3);
  for (int i = 0; i < 64; ++i) {
    other();
    ASSERT_EQ(again(), expected[static_cast<std::size_t>(i)]);
  }
}

TEST(CounterStream, PositionCountsWords) {
  CounterStream s(1, 1);
  EXPECT_EQ(s.position(), 0u);
  s();
  EXPECT_EQ(s.position(), 1u);
  s();
  s();
  EXPECT_EQ(s.position(), 3u);
}

TEST(CounterStream, StreamsAndSeedsDiffer) {
  std::set<std::uint64_t> first_words;
  for (std::uint64_t seed = 0; seed < 32; ++seed)
    for (std::uint64_t r = 0; r < 32; ++r) first_words.insert(CounterStream(seed, r)());
  EXPECT_EQ(first_words.size(), 32u * 32u);
}

TEST(CounterStream, UniformInUnitInterval) {
  CounterStream s(5, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(CounterStream, WorksWithStandardDistributions) {
  CounterStream s(11, 4);
  std::normal_distribution<double> normal;
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) sum += normal(s);
  EXPECT_NEAR(sum / 20000, 0.0, 5.0 / std::sqrt(20000.0));
}

}  // namespace
