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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pfl/core/random.h"
#include "pfl/shuffle/shuffle.h"

namespace pfl {
namespace {

RandomStream Rng(uint64_t round, uint64_t silo = 0) {
  return DeriveStream(31, {AlgorithmTag::kTest, round, silo, Purpose::kShuffle, 0});
}

TEST(ShuffleTest, ChooseParamsFollowsTheRule) {
  const PrivacyBudget budget{1.0, 1e-5};
  auto p = ChooseParams(budget, 20, 10, 1.0);
  ASSERT_TRUE(p.ok()) << p.status();
  const double eps0 = 1.0 / (2.0 * std::sqrt(20.0 * std::log(2e5)));
  const double delta0 = 1e-5 / 20.0;
  const double g = std::ceil(std::sqrt(20.0)) * std::ceil(1.0 / eps0);
  EXPECT_EQ(p->g, static_cast<int64_t>(g));
  EXPECT_EQ(p->b, static_cast<int64_t>(
                      std::ceil(64.0 * g * g * std::log(4.0 / delta0) / (eps0 * eps0 * 20.0))));
  EXPECT_EQ(p->p, 0.25);
  // L only scales the encoding.
  auto p2 = ChooseParams(budget, 20, 10, 7.0);
  EXPECT_EQ(p2->g, p->g);
  EXPECT_EQ(p2->b, p->b);
  // Tiny budgets hit the granularity cap.
  auto capped = ChooseParams({0.1, 1e-5}, 1000000, 1, 1.0);
  ASSERT_TRUE(capped.ok());
  EXPECT_EQ(capped->g, int64_t{1} << 16);
  EXPECT_FALSE(ChooseParams({0.0, 1e-5}, 4, 1, 1.0).ok());
  EXPECT_FALSE(ChooseParams({1.0, 0.7}, 4, 1, 1.0).ok());
}

TEST(ShuffleTest, ExactRecoveryWithoutBlanketNoise) {
  const P1DParams params{8, 0, 0.25};
  const double L = 2.0;
  std::vector<ScalarMessage> msgs;
  double sum = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const double x = L * k / 8.0;
    RandomStream rng = Rng(k);
    auto m = RandomizeScalar(x, L, params, rng);
    ASSERT_TRUE(m.ok());
    msgs.push_back(*m);
    sum += x;
  }
  EXPECT_DOUBLE_EQ(*AnalyzeScalar(msgs, params, 9, L), sum);

  // Vector version: coordinates on the grid of the shifted range [0, 2L].
  std::vector<LabeledMessage> all;
  std::vector<double> total(2, 0.0);
  for (int s = 0; s < 3; ++s) {
    const std::vector<double> x = {L * (s - 1) / 4.0, -L * s / 4.0};
    RandomStream rng = Rng(100 + s);
    auto v = RandomizeVector(x, L, params, rng);
    ASSERT_TRUE(v.ok());
    all.insert(all.end(), v->begin(), v->end());
    total[0] += x[0];
    total[1] += x[1];
  }
  auto est = AnalyzeVector(all, 2, params, 3, L);
  ASSERT_TRUE(est.ok());
  EXPECT_NEAR((*est)[0], total[0], 1e-14);
  EXPECT_NEAR((*est)[1], total[1], 1e-14);
}

TEST(ShuffleTest, AnalyzerIgnoresMessageOrder) {
  const P1DParams params{30, 200, 0.25};
  std::vector<LabeledMessage> all;
  for (int s = 0; s < 10; ++s) {
    const std::vector<double> x = {0.3, -0.2, 0.1};
    RandomStream rng = Rng(200 + s);
    auto v = RandomizeVector(x, 1.0, params, rng);
    all.insert(all.end(), v->begin(), v->end());
  }
  const auto base = *AnalyzeVector(all, 3, params, 10, 1.0);
  RandomStream perm = Rng(999);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(all.begin(), all.end(), perm);
    EXPECT_EQ(*AnalyzeVector(all, 3, params, 10, 1.0), base);
  }
}

TEST(ShuffleTest, StreamingProtocolMatchesMessages) {
  const P1DParams params{17, 50, 0.25};
  VectorSumProtocol proto(3, 1.5, params);
  std::vector<LabeledMessage> all;
  for (int s = 0; s < 6; ++s) {
    const std::vector<double> x = {0.1 * s, -0.5, 0.7 - 0.1 * s};
    RandomStream a = Rng(300 + s), b = Rng(300 + s);
    proto.Add(x, a);
    auto v = RandomizeVector(x, 1.5, params, b);
    all.insert(all.end(), v->begin(), v->end());
  }
  EXPECT_EQ(proto.contributors(), 6);
  EXPECT_EQ(proto.Estimate(), *AnalyzeVector(all, 3, params, 6, 1.5));
}

TEST(ShuffleTest, UnbiasedWithinBound) {
  const P1DParams params{12, 40, 0.25};
  const double L = 1.0;
  const int N = 15, trials = 4000;
  std::vector<double> xs(N);
  double truth = 0.0;
  for (int s = 0; s < N; ++s) {
    xs[s] = L * (0.05 + 0.9 * s / N);
    truth += xs[s];
  }
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<ScalarMessage> msgs;
    for (int s = 0; s < N; ++s) {
      RandomStream rng = Rng(1000 + t, s);
      msgs.push_back(*RandomizeScalar(xs[s], L, params, rng));
    }
    const double est = *AnalyzeScalar(msgs, params, N, L);
    sum += est;
    sum_sq += est * est;
  }
  const double mean = sum / trials;
  const double var = sum_sq / trials - mean * mean;
  EXPECT_NEAR(mean, truth, 4.0 * std::sqrt(var / trials));
  // Scalar range is L; the vector bound uses 2L, so divide by 4.
  EXPECT_LE(var, 1.1 * EstimatorVarianceBound(params, N, L) / 4.0);
}

TEST(ShuffleTest, RejectsBadInputs) {
  const P1DParams params{4, 4, 0.25};
  RandomStream rng = Rng(0);
  EXPECT_FALSE(RandomizeScalar(1.5, 1.0, params, rng).ok());
  EXPECT_FALSE(RandomizeScalar(-0.1, 1.0, params, rng).ok());
  EXPECT_FALSE(RandomizeVector(std::vector<double>{1.0, 1.0}, 1.0, params, rng).ok());
  EXPECT_FALSE(ValidateP1DParams({0, 1, 0.25}).ok());
  EXPECT_FALSE(ValidateP1DParams({1, 1, 0.5}).ok());
  std::vector<ScalarMessage> bad = {{100}};
  EXPECT_FALSE(AnalyzeScalar(bad, params, 1, 1.0).ok());
  std::vector<LabeledMessage> missing = {{0, {1}}};
  EXPECT_FALSE(AnalyzeVector(missing, 2, params, 1, 1.0).ok());
}

}  // namespace
}  // namespace pfl
