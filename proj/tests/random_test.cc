//
// Copyright 2026 The PFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "pfl/core/random.h"

namespace pfl {
namespace {

// Known-answer vectors published with Random123 for philox4x32-10.
TEST(PhiloxTest, KnownAnswers) {
  using C = std::array<uint32_t, 4>;
  using K = std::array<uint32_t, 2>;
  EXPECT_EQ(Philox4x32(C{0, 0, 0, 0}, K{0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

StreamKey Key(uint64_t round, uint64_t silo, Purpose p, uint64_t draw = 0) {
  return {AlgorithmTag::kTest, round, silo, p, draw};
}

TEST(RandomStreamTest, SameKeySameSequence) {
  RandomStream a = DeriveStream(42, Key(3, 1, Purpose::kNoise));
  RandomStream b = DeriveStream(42, Key(3, 1, Purpose::kNoise));
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RandomStreamTest, EveryKeyFieldSeparatesStreams) {
  std::set<uint64_t> firsts;
  const std::vector<StreamKey> keys = {
      Key(0, 0, Purpose::kNoise),     Key(1, 0, Purpose::kNoise),
      Key(0, 1, Purpose::kNoise),     Key(0, 0, Purpose::kBatch),
      Key(0, 0, Purpose::kNoise, 1),  {AlgorithmTag::kMbSgd, 0, 0, Purpose::kNoise, 0}};
  for (const StreamKey& k : keys) firsts.insert(DeriveStream(1, k).NextU64());
  firsts.insert(DeriveStream(2, keys[0]).NextU64());
  EXPECT_EQ(firsts.size(), keys.size() + 1);
}

TEST(RandomStreamTest, UniformAndGaussianMoments) {
  RandomStream rng = DeriveStream(5, Key(0, 0, Purpose::kData));
  const int n = 200000;
  double su = 0, sg = 0, sg2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double g = rng.Gaussian();
    sg += g;
    sg2 += g * g;
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sg / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(sg2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(RandomStreamTest, UniformIntCoversRange) {
  RandomStream rng = DeriveStream(9, Key(0, 0, Purpose::kBatch));
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const uint64_t v = rng.UniformInt(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 5 * std::sqrt(10000 * 6.0 / 7));
}

TEST(RandomStreamTest, BinomialMeanAndVariance) {
  RandomStream rng = DeriveStream(11, Key(0, 0, Purpose::kShuffle));
  for (auto [t, p] : {std::pair<int64_t, double>{10, 0.3}, {5000, 0.25}, {1, 0.5}}) {
    const int reps = 20000;
    double s = 0, s2 = 0;
    for (int i = 0; i < reps; ++i) {
      const double x = static_cast<double>(rng.Binomial(t, p));
      ASSERT_GE(x, 0);
      ASSERT_LE(x, t);
      s += x;
      s2 += x * x;
    }
    const double var = t * p * (1 - p);
    EXPECT_NEAR(s / reps, t * p, 5 * std::sqrt(var / reps));
    EXPECT_NEAR(s2 / reps - (s / reps) * (s / reps), var, 0.1 * var);
  }
  EXPECT_EQ(rng.Binomial(0, 0.5), 0);
  EXPECT_EQ(rng.Binomial(12, 0.0), 0);
  EXPECT_EQ(rng.Binomial(12, 1.0), 12);
}

}  // namespace
}  // namespace pfl
