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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "pfl/core/random.h"
#include "pfl/problems/losses.h"
#include "pfl/problems/problems.h"

namespace pfl {
namespace {

RandomStream Rng(uint64_t draw) {
  return DeriveStream(41, {AlgorithmTag::kTest, draw, 0, Purpose::kData, 0});
}

// Uniform-ish point in the ball of radius r.
std::vector<double> InBall(int d, double r, RandomStream& rng) {
  std::vector<double> w(d);
  rng.FillGaussian(w, 1.0);
  const double scale = r * std::pow(rng.Uniform01(), 1.0 / d) / oracles::Norm(w);
  for (double& x : w) x *= scale;
  return w;
}

std::vector<ProblemInstance> Problems() {
  std::vector<ProblemInstance> out;
  out.push_back(*MakeQuadratic({.num_silos = 4, .records_per_silo = 30, .dim = 6,
                                .mu = 0.1, .beta = 1.0, .seed = 1}));
  out.push_back(*MakeLeastSquares({.num_silos = 4, .records_per_silo = 30, .dim = 6,
                                   .rank_deficit = 2, .seed = 2}));
  out.push_back(*MakeLogistic({.num_silos = 4, .records_per_silo = 30, .dim = 6,
                               .radius = 3.0, .seed = 3}));
  return out;
}

double Radius(const ProblemInstance& p) {
  auto it = p.descriptor.find("domain_radius");
  if (it != p.descriptor.end()) return it->second;
  return p.descriptor.at("radius");
}

TEST(ProblemsTest, GradientsMatchFiniteDifferences) {
  for (const ProblemInstance& p : Problems()) {
    const SmoothLoss& f0 = *p.loss.f0;
    for (uint64_t t = 0; t < 30; ++t) {
      RandomStream rng = Rng(t);
      const std::vector<double> w = InBall(p.dim(), Radius(p), rng);
      const RecordView r = p.dataset.record(t % 4, t % 30);
      std::vector<double> g(p.dim());
      f0.Gradient(w, r, g);
      const auto fd = oracles::FiniteDifferenceGradient(
          [&](std::span<const double> x) { return f0.Value(x, r); }, w);
      const double scale = std::max(1.0, oracles::Norm(g));
      EXPECT_LE(oracles::Distance(g, fd) / scale, 1e-5) << p.family;
    }
  }
}

TEST(ProblemsTest, ReportedConstantsHoldOnTheDomain) {
  for (const ProblemInstance& p : Problems()) {
    const SmoothLoss& f0 = *p.loss.f0;
    const double R = Radius(p);
    std::vector<double> g1(p.dim()), g2(p.dim());
    for (uint64_t t = 0; t < 1000; ++t) {
      RandomStream rng = Rng(5000 + t);
      const std::vector<double> w = InBall(p.dim(), R, rng);
      const std::vector<double> v = InBall(p.dim(), R, rng);
      const RecordView r = p.dataset.record(rng.UniformInt(4), rng.UniformInt(30));
      f0.Gradient(w, r, g1);
      f0.Gradient(v, r, g2);
      EXPECT_LE(oracles::Norm(g1), p.loss.lipschitz_L * (1 + 1e-12)) << p.family;
      EXPECT_LE(oracles::Distance(g1, g2),
                p.loss.smooth_beta * oracles::Distance(w, v) * (1 + 1e-12) + 1e-15)
          << p.family;
    }
  }
}

TEST(ProblemsTest, KnownMinimizerIsOptimal) {
  for (const ProblemInstance& p : Problems()) {
    if (!p.known.has_value()) continue;
    const double f_star = EmpiricalSmoothRisk(*p.loss.f0, p.dataset, p.known->minimizer);
    EXPECT_NEAR(f_star, p.known->f_star, 1e-12 * (1 + std::abs(f_star)));
    for (uint64_t t = 0; t < 1000; ++t) {
      RandomStream rng = Rng(20000 + t);
      std::vector<double> w = p.known->minimizer;
      std::vector<double> dir(p.dim());
      rng.FillGaussian(dir, 0.01 + 2.0 * rng.Uniform01());
      for (int k = 0; k < p.dim(); ++k) w[k] += dir[k];
      EXPECT_LE(f_star, EmpiricalSmoothRisk(*p.loss.f0, p.dataset, w) + 1e-12) << p.family;
    }
  }
}

TEST(ProblemsTest, QuadraticConditionNumberAndSiloMeans) {
  auto p = MakeQuadratic({.num_silos = 5, .records_per_silo = 50, .dim = 10,
                          .mu = 0.1, .beta = 1.0, .seed = 6});
  ASSERT_TRUE(p.ok() && p->known.has_value());
  EXPECT_NEAR(p->known->kappa, 10.0, 1e-9);
  EXPECT_NEAR(p->loss.smooth_beta, 1.0, 1e-12);
  // Gradient at the minimizer vanishes.
  const auto g = EmpiricalGradient(*p->loss.f0, p->dataset, p->known->minimizer);
  EXPECT_LE(oracles::Norm(g), 1e-12);
}

TEST(ProblemsTest, GeneratorIsDeterministic) {
  auto a = MakeLogistic({.num_silos = 3, .records_per_silo = 20, .dim = 4, .seed = 9});
  auto b = MakeLogistic({.num_silos = 3, .records_per_silo = 20, .dim = 4, .seed = 9});
  auto c = MakeLogistic({.num_silos = 3, .records_per_silo = 20, .dim = 4, .seed = 10});
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a->dataset.silo_features(i), b->dataset.silo_features(i));
    EXPECT_NE(a->dataset.silo_features(i), c->dataset.silo_features(i));
  }
  EXPECT_FALSE(MakeQuadratic({.num_silos = 0}).ok());
  EXPECT_FALSE(MakeQuadratic({.mu = 2.0, .beta = 1.0}).ok());
}

TEST(ProblemsTest, CsvRoundTrip) {
  auto p = MakeLeastSquares({.num_silos = 3, .records_per_silo = 5, .dim = 3, .seed = 4});
  ASSERT_TRUE(p.ok());
  const std::string path =
      (std::filesystem::temp_directory_path() / "pfl_problems_test.csv").string();
  ASSERT_TRUE(SaveCsv(p->dataset, path).ok());
  auto back = LoadCsv(path, {.d_features = 3, .has_label = true});
  ASSERT_TRUE(back.ok()) << back.status();
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back->silo_features(i), p->dataset.silo_features(i));
    EXPECT_EQ(back->silo_labels(i), p->dataset.silo_labels(i));
  }
  auto rebuilt = ProblemFromDataset(*back, "least_squares", 0.0);
  ASSERT_TRUE(rebuilt.ok());
  EXPECT_NEAR(rebuilt->known->f_star, p->known->f_star, 1e-12);
  std::filesystem::remove(path);
}

TEST(ProblemsTest, CsvRejectsUnevenSilos) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "pfl_uneven.csv").string();
  {
    std::ofstream out(path);
    out << "silo_id,x0\n0,1.0\n0,2.0\n1,3.0\n";
  }
  EXPECT_FALSE(LoadCsv(path, {}).ok());
  auto trimmed = LoadCsv(path, {.truncate = true});
  ASSERT_TRUE(trimmed.ok()) << trimmed.status();
  EXPECT_EQ(trimmed->records_per_silo(), 1);
  EXPECT_FALSE(LoadCsv(path + ".missing", {}).ok());
  std::filesystem::remove(path);
}

TEST(ProblemsTest, EvaluateReportsExcessRisk) {
  auto p = MakeQuadratic({.num_silos = 3, .records_per_silo = 10, .dim = 4, .seed = 2});
  ASSERT_TRUE(p.ok());
  auto at_opt = Evaluate(*p, p->known->minimizer, 1.0);
  ASSERT_TRUE(at_opt.ok());
  ASSERT_TRUE(at_opt->excess_risk.has_value());
  EXPECT_NEAR(*at_opt->excess_risk, 0.0, 1e-12);
  auto lg = MakeLogistic({.num_silos = 3, .records_per_silo = 10, .dim = 4, .seed = 2});
  auto m = Evaluate(*lg, std::vector<double>(4, 0.0), 1.0, 50, 3);
  ASSERT_TRUE(m.ok());
  EXPECT_FALSE(m->excess_risk.has_value());
  EXPECT_NEAR(m->empirical_risk, std::log(2.0), 1e-12);
  ASSERT_TRUE(m->population_risk.has_value());
  EXPECT_NEAR(*m->population_risk, std::log(2.0), 1e-12);
}

TEST(ProblemsTest, HeterogeneityIsZeroForIdenticalSilos) {
  auto data = FederatedDataset::Create(2, {{1, 2, 3, 4}, {1, 2, 3, 4}}, {});
  auto p = ProblemFromDataset(*data, "quadratic", 0.0);
  ASSERT_TRUE(p.ok());
  const auto rep = Heterogeneity(*p, {{0.0, 0.0}, {1.0, -1.0}});
  EXPECT_NEAR(rep.upsilon_sq, 0.0, 1e-24);
}

}  // namespace
}  // namespace pfl
