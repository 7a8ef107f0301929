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

#include "pfl/kernels/kernels.h"
#include "pfl/problems/problems.h"
#include "pfl/prox/prox.h"

namespace pfl {

absl::StatusOr<Metrics> Evaluate(const ProblemInstance& problem,
                                 std::span<const double> w, double eta,
                                 int population_samples, uint64_t seed) {
  const CompositeLoss& loss = problem.loss;
  auto gm = ComputeGradientMapping(loss, w, eta, problem.dataset);
  if (!gm.ok()) return gm.status();
  Metrics m;
  m.grad_mapping_norm_sq = gm->norm_sq;
  m.empirical_risk = EmpiricalSmoothRisk(*loss.f0, problem.dataset, w) +
                     RegularizerValue(loss.f1, w);
  if (problem.known.has_value()) {
    m.excess_risk = m.empirical_risk - problem.known->f_star;
  }
  if (population_samples > 0 && problem.population) {
    std::vector<double> x;
    double y = 0.0;
    double sum = 0.0, sum_sq = 0.0;
    int64_t count = 0;
    for (int i = 0; i < problem.dataset.num_silos(); ++i) {
      RandomStream rng = DeriveStream(
          seed, {AlgorithmTag::kGenerator, 1, static_cast<uint64_t>(i),
                 Purpose::kData, 99});
      for (int s = 0; s < population_samples; ++s) {
        problem.population(i, rng, x, y);
        const double v = loss.f0->Value(w, RecordView{x, y});
        sum += v;
        sum_sq += v * v;
        ++count;
      }
    }
    const double mean = sum / count;
    const double var = count > 1 ? (sum_sq - count * mean * mean) / (count - 1) : 0.0;
    m.population_risk = mean + RegularizerValue(loss.f1, w);
    m.population_se = std::sqrt(std::max(var, 0.0) / count);
  }
  return m;
}

HeterogeneityReport Heterogeneity(const ProblemInstance& problem,
                                  const std::vector<ModelPoint>& probes) {
  HeterogeneityReport report;
  const FederatedDataset& data = problem.dataset;
  const int N = data.num_silos();
  for (const ModelPoint& w : probes) {
    const size_t d = w.size();
    std::vector<std::vector<double>> silo(N, std::vector<double>(d));
    std::vector<double> mean(d, 0.0), scratch(d);
    for (int i = 0; i < N; ++i) {
      SiloMeanGradient(*problem.loss.f0, data, i, {}, w, kNoClip, silo[i], scratch);
      kernels::Axpy(1.0, silo[i], mean);
    }
    kernels::Scale(1.0 / N, mean);
    double acc = 0.0;
    for (int i = 0; i < N; ++i) acc += kernels::SquaredDistance(silo[i], mean);
    report.upsilon_sq = std::max(report.upsilon_sq, acc / N);
  }
  return report;
}

}  // namespace pfl
