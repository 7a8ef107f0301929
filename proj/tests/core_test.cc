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
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "pfl/core/dataset.h"
#include "pfl/core/loss.h"
#include "pfl/core/random.h"
#include "pfl/core/types.h"
#include "pfl/optimizers/optimizers.h"
#include "pfl/problems/losses.h"
#include "pfl/problems/problems.h"

namespace pfl {
namespace {

std::vector<double> Gaussian(size_t n, uint64_t draw, double scale = 1.0) {
  RandomStream rng = DeriveStream(3, {AlgorithmTag::kTest, draw, 0, Purpose::kData, 0});
  std::vector<double> v(n);
  rng.FillGaussian(v, scale);
  return v;
}

TEST(ClipTest, IdempotentAndDirectionPreserving) {
  for (uint64_t t = 0; t < 200; ++t) {
    const std::vector<double> g = Gaussian(6, t, 3.0);
    const double L = 0.1 + 0.05 * t;
    auto once = ClipGradient(g, L);
    ASSERT_TRUE(once.ok());
    auto twice = ClipGradient(*once, L);
    ASSERT_TRUE(twice.ok());
    EXPECT_EQ(*once, *twice);
    EXPECT_LE(oracles::Norm(*once), L * (1 + 1e-15));
    // clip(c g) is parallel to g for c > 0.
    std::vector<double> cg = g;
    for (double& x : cg) x *= 7.5;
    auto scaled = ClipGradient(cg, L);
    ASSERT_TRUE(scaled.ok());
    const double cosine = std::inner_product(scaled->begin(), scaled->end(), g.begin(), 0.0) /
                          (oracles::Norm(*scaled) * oracles::Norm(g));
    EXPECT_NEAR(cosine, 1.0, 1e-12);
  }
}

TEST(ClipTest, RejectsBadInput) {
  std::vector<double> g = {1.0, NAN};
  EXPECT_FALSE(ClipGradient(g, 1.0).ok());
  EXPECT_FALSE(ClipGradient(std::vector<double>{1.0}, 0.0).ok());
  EXPECT_FALSE(ClipGradient(std::vector<double>{1.0}, -1.0).ok());
}

TEST(DatasetTest, CreateValidatesShapes) {
  EXPECT_TRUE(FederatedDataset::Create(2, {{1, 2, 3, 4}, {5, 6, 7, 8}}, {}).ok());
  EXPECT_FALSE(FederatedDataset::Create(2, {{1, 2, 3, 4}, {5, 6}}, {}).ok());
  EXPECT_FALSE(FederatedDataset::Create(0, {{1}}, {}).ok());
  EXPECT_FALSE(FederatedDataset::Create(2, {}, {}).ok());
  EXPECT_FALSE(FederatedDataset::Create(1, {{1, 2}}, {{1.0}}).ok());
  auto data = FederatedDataset::Create(1, {{1, 2}, {3, 4}}, {{1, -1}, {-1, 1}});
  ASSERT_TRUE(data.ok());
  EXPECT_EQ(data->num_silos(), 2);
  EXPECT_EQ(data->records_per_silo(), 2);
  EXPECT_EQ(data->record(1, 0).x[0], 3.0);
  EXPECT_EQ(data->record(1, 0).y, -1.0);
  const std::vector<double> x = {9.0};
  FederatedDataset swapped = data->WithRecord(1, 0, x, 1.0);
  EXPECT_EQ(swapped.record(1, 0).x[0], 9.0);
  EXPECT_EQ(swapped.record(1, 0).y, 1.0);
  EXPECT_EQ(data->record(1, 0).x[0], 3.0);
}

TEST(RegularizerTest, ValidationAndValues) {
  EXPECT_TRUE(ValidateRegularizer(ZeroReg{}).ok());
  EXPECT_FALSE(ValidateRegularizer(L1Reg{-1.0}).ok());
  EXPECT_FALSE(ValidateRegularizer(BallReg{0.0}).ok());
  EXPECT_FALSE(ValidateRegularizer(L1BallReg{0.1, -2.0}).ok());
  const std::vector<double> w = {3.0, -4.0};
  EXPECT_EQ(RegularizerValue(L1Reg{0.5}, w), 3.5);
  EXPECT_EQ(RegularizerValue(BallReg{5.0}, w), 0.0);
  EXPECT_TRUE(std::isinf(RegularizerValue(BallReg{4.0}, w)));
}

TEST(LossTest, EmpiricalGradientIsMeanOfSiloMeans) {
  auto p = MakeQuadratic({.num_silos = 3, .records_per_silo = 7, .dim = 4, .seed = 2});
  ASSERT_TRUE(p.ok());
  const std::vector<double> w = Gaussian(4, 99);
  std::vector<double> expect(4, 0.0), g(4);
  const int total = 3 * 7;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 7; ++j) {
      p->loss.f0->Gradient(w, p->dataset.record(i, j), g);
      for (int k = 0; k < 4; ++k) expect[k] += g[k] / total;
    }
  }
  const std::vector<double> got = EmpiricalGradient(*p->loss.f0, p->dataset, w);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(got[k], expect[k], 1e-12);
}

TEST(DeterminismTest, IdenticalConfigsGiveIdenticalRows) {
  auto p = MakeLogistic({.num_silos = 4, .records_per_silo = 60, .dim = 5, .seed = 1});
  ASSERT_TRUE(p.ok());
  RunConfig c;
  c.rounds = 6;
  c.phase_length = 3;
  c.batch_size_refresh = 30;
  c.batch_size_diff = 20;
  c.seed = 17;
  c.privacy = {2.0, 1e-4};
  c.availability = FixedAvailability{3};
  auto a = RunIsrlSpider(*p, c);
  auto b = RunIsrlSpider(*p, c);
  ASSERT_TRUE(a.ok() && b.ok());
  ASSERT_EQ(a->rows.size(), b->rows.size());
  for (size_t r = 0; r < a->rows.size(); ++r) {
    EXPECT_EQ(a->rows[r].train_risk, b->rows[r].train_risk);
    EXPECT_EQ(a->rows[r].grad_mapping_norm_sq, b->rows[r].grad_mapping_norm_sq);
    EXPECT_EQ(a->rows[r].epsilon_spent, b->rows[r].epsilon_spent);
  }
  EXPECT_EQ(a->w_priv, b->w_priv);
  c.seed = 18;
  auto other = RunIsrlSpider(*p, c);
  ASSERT_TRUE(other.ok());
  EXPECT_NE(other->final_model, a->final_model);
}

}  // namespace
}  // namespace pfl
