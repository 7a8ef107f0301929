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

#include "pfl/kernels/kernels.h"
#include "pfl/optimizers/messages.h"
#include "pfl/optimizers/optimizers.h"
#include "run_state.h"

namespace pfl {
namespace internal {

absl::StatusOr<RunResult> RunSpiderCore(const ProblemInstance& problem,
                                        const RunConfig& config,
                                        Algorithm algorithm) {
  auto created = RunState::Create(problem, config, algorithm, TagFor(algorithm));
  if (!created.ok()) return created.status();
  RunState& st = *created;
  const NoisePlan& plan = st.plan;
  if (plan.return_initial_point) {
    ModelPoint w = st.w;
    return st.Finish(w, w, 0);
  }
  const bool shuffle = algorithm == Algorithm::kSdpSpider && st.is_private();
  const double L = plan.L;
  const double beta = plan.dims.smooth_beta;
  const int R = plan.rounds;
  const int q = plan.phase_length;

  std::optional<SpiderDiagnostics> diag;
  if (config.diagnostics) {
    diag.emplace();
    const double inv_m = plan.mean_inverse_available;
    const bool partial = plan.min_available < plan.dims.num_silos ||
                         std::holds_alternative<RandomAvailability>(config.availability);
    const double sample1 = partial ? 2.0 * L * L * inv_m / st.n : 0.0;
    const double sample2 = partial ? beta * beta * inv_m / st.n : 0.0;
    diag->tau1_sq = sample1 + st.d * plan.effective.sigma1_sq * inv_m;
    diag->tau2_sq = 8.0 * (sample2 + st.d * plan.effective.sigma2_sq * inv_m);
  }

  RandomStream out_rng = st.Stream(0, 0, Purpose::kOutput);
  const int64_t pick = 1 + static_cast<int64_t>(out_rng.UniformInt(R));
  ModelPoint chosen = st.w;
  ModelPoint w_prev = st.w;
  std::vector<double> h(st.d, 0.0), agg(st.d), msg(st.d);
  int64_t phase = 0;
  for (int r = 0; r < R; ++r) {
    const std::vector<int> silos = st.Available(r);
    const int m = static_cast<int>(silos.size());
    auto batch = [&](int i, int k) {
      RandomStream rng = st.Stream(r, i, Purpose::kBatch);
      return SampleDistinct(st.n, k, rng);
    };
    const double step = std::sqrt(kernels::SquaredDistance(st.w, w_prev));
    if (r % q == 0) {
      phase = r;
      if (!shuffle) {
        std::fill(h.begin(), h.end(), 0.0);
        for (int i : silos) {
          MeanClippedGradient(st.f0(), st.data(), i, batch(i, plan.batch_refresh),
                              st.w, L, msg);
          if (st.is_private()) {
            RandomStream rng = st.Stream(r, i, Purpose::kNoise, 0);
            AddGaussianNoise(msg, plan.effective.sigma1_sq, rng);
          }
          kernels::Axpy(1.0, msg, h);
        }
        kernels::Scale(1.0 / m, h);
        if (st.is_private()) {
          if (auto c = st.accountant.ChargeRho(SpiderRefreshRho(plan)); !c.ok()) return c;
        }
      } else {
        auto mean = ShuffleMean(st, 0, silos, r, 0, L, [&](int i) {
          return ClippedGradients(st.f0(), st.data(), i,
                                  batch(i, plan.batch_refresh), st.w, L);
        });
        if (!mean.ok()) return mean.status();
        h = *std::move(mean);
        if (auto c = st.accountant.ChargeEpsilon(kGroupFirst, st.ShuffleEpsilon(0, m));
            !c.ok()) {
          return c;
        }
      }
    } else if (!shuffle) {
      const double variance = SpiderDiffVariance(plan, step);
      std::fill(agg.begin(), agg.end(), 0.0);
      for (int i : silos) {
        MeanClippedDifference(st.f0(), st.data(), i, batch(i, plan.batch_diff),
                              st.w, w_prev, L, beta * step, msg);
        if (st.is_private()) {
          RandomStream rng = st.Stream(r, i, Purpose::kNoise, 1);
          AddGaussianNoise(msg, variance, rng);
        }
        kernels::Axpy(1.0, msg, agg);
      }
      kernels::Scale(1.0 / m, agg);
      kernels::Axpy(1.0, agg, h);
      if (st.is_private()) {
        if (auto c = st.accountant.ChargeRho(SpiderDiffRho(plan, step)); !c.ok()) return c;
      }
    } else {
      const double range = std::min(2.0 * L, beta * step);
      // A zero range carries no information: H_r = 0 and nothing is spent.
      if (range > 0.0) {
        auto mean = ShuffleMean(st, 1, silos, r, 1, range, [&](int i) {
          return ClippedDifferences(st.f0(), st.data(), i,
                                    batch(i, plan.batch_diff), st.w, w_prev, L,
                                    range);
        });
        if (!mean.ok()) return mean.status();
        kernels::Axpy(1.0, *mean, h);
        if (auto c = st.accountant.ChargeEpsilon(kGroupSecond, st.ShuffleEpsilon(1, m));
            !c.ok()) {
          return c;
        }
      }
    }
    if (diag) {
      const std::vector<double> g = EmpiricalGradient(st.f0(), st.data(), st.w, L);
      diag->estimate_error_sq.push_back(kernels::SquaredDistance(h, g));
      diag->phase_start.push_back(phase);
      diag->step_norm_sq.push_back(step * step);
    }
    w_prev = st.w;
    st.Step(st.w, h);
    if (r + 1 == pick) chosen = st.w;
    if (auto c = st.Record(r + 1, st.w); !c.ok()) return c;
  }
  st.result.spider = std::move(diag);
  ModelPoint last = st.w;
  return st.Finish(last, chosen, pick);
}

}  // namespace internal

absl::StatusOr<RunResult> RunIsrlSpider(const ProblemInstance& problem,
                                        const RunConfig& config) {
  return internal::RunSpiderCore(problem, config, Algorithm::kIsrlSpider);
}

absl::StatusOr<RunResult> RunSdpSpider(const ProblemInstance& problem,
                                       const RunConfig& config) {
  return internal::RunSpiderCore(problem, config, Algorithm::kSdpSpider);
}

absl::StatusOr<RunResult> RunIsrlSpiderAlt(const ProblemInstance& problem,
                                           const RunConfig& config) {
  const Algorithm algorithm = Algorithm::kIsrlSpiderAlt;
  auto created =
      internal::RunState::Create(problem, config, algorithm, TagFor(algorithm));
  if (!created.ok()) return created.status();
  internal::RunState& st = *created;
  const NoisePlan& plan = st.plan;
  const double L = plan.L;
  const int R = plan.rounds;

  // Noisy K2-gradient of every available silo at x, averaged.
  std::vector<double> msg(st.d);
  auto noisy_gradient = [&](uint64_t key, const std::vector<int>& silos,
                            std::span<const double> x, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i : silos) {
      RandomStream brng = st.Stream(key, i, Purpose::kBatch, 2);
      const std::vector<int> idx = SampleDistinct(st.n, plan.batch_diff, brng);
      MeanClippedGradient(st.f0(), st.data(), i, idx, x, L, msg);
      if (st.is_private()) {
        RandomStream rng = st.Stream(key, i, Purpose::kNoise, 2);
        AddGaussianNoise(msg, plan.effective.sigma2_sq, rng);
      }
      kernels::Axpy(1.0, msg, out);
    }
    kernels::Scale(1.0 / silos.size(), out);
    return st.is_private() ? st.accountant.ChargeRho(AltSpiderGradRho(plan))
                           : absl::OkStatus();
  };

  RandomStream out_rng = st.Stream(0, 0, Purpose::kOutput);
  const int64_t pick = static_cast<int64_t>(out_rng.UniformInt(2 * static_cast<uint64_t>(R)));
  ModelPoint chosen = st.w;
  std::vector<double> v(st.d), v1(st.d), agg(st.d);
  if (auto c = noisy_gradient(0, st.Available(0), st.w, v); !c.ok()) return c;
  ModelPoint w0 = st.w, w1(st.d);
  for (int r = 0; r < R; ++r) {
    const uint64_t key = static_cast<uint64_t>(r) + 1;
    const std::vector<int> silos = st.Available(key);
    w1 = w0;
    st.Step(w1, v);
    std::fill(agg.begin(), agg.end(), 0.0);
    for (int i : silos) {
      RandomStream brng = st.Stream(key, i, Purpose::kBatch, 1);
      const std::vector<int> idx = SampleDistinct(st.n, plan.batch_refresh, brng);
      MeanClippedDifference(st.f0(), st.data(), i, idx, w1, w0, L, kNoClip, msg);
      if (st.is_private()) {
        RandomStream rng = st.Stream(key, i, Purpose::kNoise, 1);
        AddGaussianNoise(msg, plan.effective.sigma1_sq, rng);
      }
      kernels::Axpy(1.0, msg, agg);
    }
    kernels::Scale(1.0 / silos.size(), agg);
    for (int j = 0; j < st.d; ++j) v1[j] = v[j] + agg[j];
    if (st.is_private()) {
      if (auto c = st.accountant.ChargeRho(AltSpiderDiffRho(plan)); !c.ok()) return c;
    }
    st.w = w1;
    st.Step(st.w, v1);
    if (auto c = noisy_gradient(key, silos, st.w, v); !c.ok()) return c;
    if (pick == 2 * r) chosen = w1;
    if (pick == 2 * r + 1) chosen = st.w;
    w0 = st.w;
    if (auto c = st.Record(r + 1, st.w); !c.ok()) return c;
  }
  ModelPoint last = st.w;
  return st.Finish(last, chosen, pick);
}

}  // namespace pfl
