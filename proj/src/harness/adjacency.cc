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

#include "pfl/harness/adjacency.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pfl/core/random.h"
#include "pfl/kernels/kernels.h"
#include "pfl/optimizers/messages.h"
#include "pfl/optimizers/optimizers.h"

namespace pfl {
namespace {

enum class Kind { kGradient, kDiffNoClip, kDiffSlope };

struct MessageSpec {
  std::string name;
  Kind kind = Kind::kGradient;
  int batch = 0;  // 0 or >= n means all records
  bool shuffle_input = false;
};

// Slack for floating point summation; the bounds themselves are exact.
bool Within(double observed, double declared) {
  return observed <= declared * (1.0 + 1e-9) + 1e-12;
}

std::vector<MessageSpec> MessagesFor(Algorithm a, const NoisePlan& plan) {
  const int n = plan.dims.records_per_silo;
  switch (a) {
    case Algorithm::kIsrlProxSgd:
    case Algorithm::kLocalSgd:
      return {{"gradient", Kind::kGradient, plan.batch_size, false}};
    case Algorithm::kSdpProxSgd:
      return {{"gradient", Kind::kGradient, plan.batch_size, true}};
    case Algorithm::kMbSgd:
      return {{"gradient", Kind::kGradient, plan.batch_refresh, false}};
    case Algorithm::kIsrlSvrg:
    case Algorithm::kIsrlPlSvrg:
      return {{"anchor", Kind::kGradient, n, false},
              {"difference", Kind::kDiffNoClip, plan.batch_size, false}};
    case Algorithm::kSdpSvrg:
    case Algorithm::kSdpPlSvrg:
      return {{"anchor", Kind::kGradient, n, true},
              {"difference", Kind::kDiffNoClip, plan.batch_size, true}};
    case Algorithm::kIsrlSpider:
      return {{"refresh", Kind::kGradient, plan.batch_refresh, false},
              {"difference", Kind::kDiffSlope, plan.batch_diff, false}};
    case Algorithm::kSdpSpider:
      return {{"refresh", Kind::kGradient, plan.batch_refresh, true},
              {"difference", Kind::kDiffSlope, plan.batch_diff, true}};
    case Algorithm::kIsrlSpiderAlt:
      return {{"difference", Kind::kDiffNoClip, plan.batch_refresh, false},
              {"gradient", Kind::kGradient, plan.batch_diff, false}};
  }
  return {};
}

}  // namespace

absl::StatusOr<std::vector<AdjacencyCheck>> ProbeAdjacency(
    const ProblemInstance& problem, Algorithm algorithm,
    const RunConfig& config, int trials, uint64_t seed) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  auto plan = PlanNoise(algorithm, config, DimsOf(problem));
  if (!plan.ok()) return plan.status();
  const FederatedDataset& data = problem.dataset;
  const SmoothLoss& f0 = *problem.loss.f0;
  const int N = data.num_silos();
  const int n = data.records_per_silo();
  const int d = problem.dim();
  const int dx = data.d_features();
  const double L = plan->L;
  const double beta = plan->dims.smooth_beta;

  double max_x = 0.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < n; ++j) {
      max_x = std::max(max_x, std::sqrt(kernels::SquaredNorm(data.record(i, j).x)));
    }
  }
  double w_scale = 1.0;
  if (auto it = problem.descriptor.find("domain_radius");
      it != problem.descriptor.end() && std::isfinite(it->second)) {
    w_scale = it->second / std::sqrt(static_cast<double>(d));
  }

  std::vector<AdjacencyCheck> out;
  for (const MessageSpec& spec : MessagesFor(algorithm, *plan)) {
    AdjacencyCheck check;
    check.algorithm = AlgorithmName(algorithm);
    check.message = spec.name;
    check.trials = trials;
    const int K = (spec.batch <= 0 || spec.batch >= n) ? n : spec.batch;
    std::vector<double> w(d), w_prev(d), a(d), b(d);
    bool all_ok = true;
    for (int t = 0; t < trials; ++t) {
      const StreamKey key{AlgorithmTag::kProbe, static_cast<uint64_t>(t),
                          static_cast<uint64_t>(algorithm), Purpose::kData,
                          out.size()};
      RandomStream rng = DeriveStream(seed, key);
      rng.FillGaussian(w, w_scale);
      rng.FillGaussian(w_prev, w_scale);
      const int silo = static_cast<int>(rng.UniformInt(N));
      const int j = static_cast<int>(rng.UniformInt(n));
      std::vector<double> x(dx);
      double y = 0.0;
      if (t % 2 == 0 && N > 1) {
        const int other = (silo + 1 + static_cast<int>(rng.UniformInt(N - 1))) % N;
        const RecordView r = data.record(other, static_cast<int>(rng.UniformInt(n)));
        std::copy(r.x.begin(), r.x.end(), x.begin());
        y = r.y;
      } else {
        const RecordView r = data.record(silo, j);
        const double far = 10.0 * std::max(1.0, max_x);
        rng.FillGaussian(x, 0.1);
        double norm = std::sqrt(kernels::SquaredNorm(r.x));
        for (int k = 0; k < dx; ++k) {
          x[k] += norm > 0.0 ? -far * r.x[k] / norm : far;
        }
        y = -r.y;
      }
      const FederatedDataset swapped = data.WithRecord(silo, j, x, y);

      std::vector<int> idx;
      if (K < n) {
        idx = SampleDistinct(n, K, rng);
        if (!std::binary_search(idx.begin(), idx.end(), j)) {
          idx[rng.UniformInt(K)] = j;
          std::sort(idx.begin(), idx.end());
        }
      }
      const double step = std::sqrt(kernels::SquaredDistance(w, w_prev));
      double declared = 0.0;
      double range = 0.0;
      std::function<void(const FederatedDataset&, std::vector<double>&)> message;
      std::function<std::vector<double>(const FederatedDataset&)> inputs;
      switch (spec.kind) {
        case Kind::kGradient:
          declared = 2.0 * L / K;
          range = L;
          message = [&](const FederatedDataset& D, std::vector<double>& m) {
            MeanClippedGradient(f0, D, silo, idx, w, L, m);
          };
          inputs = [&](const FederatedDataset& D) {
            return ClippedGradients(f0, D, silo, idx, w, L);
          };
          break;
        case Kind::kDiffNoClip:
          declared = 4.0 * L / K;
          range = 2.0 * L;
          message = [&](const FederatedDataset& D, std::vector<double>& m) {
            MeanClippedDifference(f0, D, silo, idx, w, w_prev, L, kNoClip, m);
          };
          inputs = [&](const FederatedDataset& D) {
            return ClippedDifferences(f0, D, silo, idx, w, w_prev, L, kNoClip);
          };
          break;
        case Kind::kDiffSlope:
          declared = std::min(2.0 * beta * step, 4.0 * L) / K;
          range = std::min(2.0 * L, beta * step);
          message = [&](const FederatedDataset& D, std::vector<double>& m) {
            MeanClippedDifference(f0, D, silo, idx, w, w_prev, L, beta * step, m);
          };
          inputs = [&](const FederatedDataset& D) {
            return ClippedDifferences(f0, D, silo, idx, w, w_prev, L, range);
          };
          break;
      }
      double observed = 0.0;
      if (spec.shuffle_input) {
        check.declared = std::max(check.declared, range);
        for (const FederatedDataset* D : {&data, &swapped}) {
          const std::vector<double> rows = inputs(*D);
          for (size_t r = 0; r * d < rows.size(); ++r) {
            std::span<const double> row(rows.data() + r * d, d);
            const double norm = std::sqrt(kernels::SquaredNorm(row));
            observed = std::max(observed, norm);
            all_ok = all_ok && Within(norm, range);
          }
        }
      } else {
        message(data, a);
        message(swapped, b);
        observed = std::sqrt(kernels::SquaredDistance(a, b));
        check.declared = std::max(check.declared, declared);
        all_ok = all_ok && Within(observed, declared);
      }
      check.max_observed = std::max(check.max_observed, observed);
    }
    check.ok = all_ok;
    out.push_back(std::move(check));
  }
  return out;
}

}  // namespace pfl
