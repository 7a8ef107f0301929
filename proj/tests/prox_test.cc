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
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "pfl/core/random.h"
#include "pfl/prox/prox.h"
#include "pfl/problems/problems.h"

namespace pfl {
namespace {

RandomStream Rng(uint64_t draw) {
  return DeriveStream(21, {AlgorithmTag::kTest, draw, 0, Purpose::kData, 0});
}

std::vector<RegularizerSpec> Regularizers() {
  return {ZeroReg{}, L1Reg{0.3}, BallReg{1.5}, L1BallReg{0.2, 1.0}};
}

TEST(ProxTest, ClosedFormsOnSmallCases) {
  const std::vector<double> z = {3.0, -0.1, 0.5};
  auto l1 = Prox(L1Reg{1.0}, 0.4, z);
  ASSERT_TRUE(l1.ok());
  EXPECT_NEAR((*l1)[0], 2.6, 1e-15);
  EXPECT_EQ((*l1)[1], 0.0);
  EXPECT_NEAR((*l1)[2], 0.1, 1e-15);
  auto ball = Prox(BallReg{1.0}, 7.0, std::vector<double>{3.0, 4.0});
  ASSERT_TRUE(ball.ok());
  EXPECT_NEAR((*ball)[0], 0.6, 1e-15);
  EXPECT_NEAR((*ball)[1], 0.8, 1e-15);
  auto inside = Prox(BallReg{10.0}, 1.0, z);
  EXPECT_EQ(*inside, z);
  EXPECT_FALSE(Prox(L1Reg{1.0}, -1.0, z).ok());
}

TEST(ProxTest, MatchesNumericArgmin) {
  for (uint64_t t = 0; t < 150; ++t) {
    RandomStream rng = Rng(t);
    const int d = 1 + static_cast<int>(rng.UniformInt(10));
    const double eta = 0.05 + 2.0 * rng.Uniform01();
    std::vector<double> z(d);
    rng.FillGaussian(z, 1.0 + 2.0 * rng.Uniform01());
    for (const RegularizerSpec& f1 : Regularizers()) {
      auto got = Prox(f1, eta, z);
      ASSERT_TRUE(got.ok());
      const std::vector<double> want = oracles::ProxArgmin(f1, eta, z);
      EXPECT_LE(oracles::Distance(*got, want), 1e-6) << RegularizerName(f1);
      EXPECT_LE(oracles::ProxObjective(f1, eta, z, *got),
                oracles::ProxObjective(f1, eta, z, want) + 1e-12);
    }
  }
}

TEST(ProxTest, NonExpansiveAndFeasible) {
  for (uint64_t t = 0; t < 1000; ++t) {
    RandomStream rng = Rng(10000 + t);
    const int d = 1 + static_cast<int>(rng.UniformInt(10));
    std::vector<double> a(d), b(d);
    rng.FillGaussian(a, 3.0);
    rng.FillGaussian(b, 3.0);
    for (const RegularizerSpec& f1 : Regularizers()) {
      auto pa = Prox(f1, 0.7, a);
      auto pb = Prox(f1, 0.7, b);
      ASSERT_TRUE(pa.ok() && pb.ok());
      EXPECT_LE(oracles::Distance(*pa, *pb), oracles::Distance(a, b) * (1 + 1e-12));
      if (const auto* r = std::get_if<BallReg>(&f1)) {
        EXPECT_LE(oracles::Norm(*pa), r->radius + 1e-12);
      }
    }
  }
}

TEST(GradientMappingTest, ZeroRegularizerIsTheGradientBitwise) {
  auto p = MakeLeastSquares({.num_silos = 3, .records_per_silo = 20, .dim = 6, .seed = 4});
  ASSERT_TRUE(p.ok());
  RandomStream rng = Rng(5);
  std::vector<double> w(6);
  rng.FillGaussian(w, 1.0);
  auto gm = ComputeGradientMapping(p->loss, w, 0.3, p->dataset);
  ASSERT_TRUE(gm.ok());
  EXPECT_EQ(gm->vector, EmpiricalGradient(*p->loss.f0, p->dataset, w));
}

TEST(GradientMappingTest, ZeroAtProxFixedPoint) {
  // w = prox(w - eta g) makes the mapping vanish.
  const std::vector<double> w = {0.0, 0.5};
  const std::vector<double> g = {0.1, -1.0};
  auto gm = GradientMappingFromGradient(L1Reg{1.0}, w, g, 0.5);
  ASSERT_TRUE(gm.ok());
  EXPECT_EQ(gm->vector, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(gm->norm_sq, 0.0);
}

TEST(PplTest, StronglyConvexQuadraticSatisfiesPpl) {
  auto p = MakeQuadratic({.num_silos = 3, .records_per_silo = 20, .dim = 5,
                          .mu = 0.2, .beta = 2.0, .seed = 8});
  ASSERT_TRUE(p.ok() && p->known.has_value());
  for (uint64_t t = 0; t < 50; ++t) {
    RandomStream rng = Rng(500 + t);
    std::vector<double> w(5);
    rng.FillGaussian(w, 2.0);
    auto res = PplResidual(p->loss, p->dataset, w, 0.2, 2.0, p->known->f_star);
    ASSERT_TRUE(res.ok());
    EXPECT_GE(*res, -1e-8);
  }
}

}  // namespace
}  // namespace pfl
