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

#include "pfl/kernels/kernels.h"
#include "pfl/optimizers/messages.h"
#include "pfl/optimizers/optimizers.h"
#include "run_state.h"

namespace pfl {
namespace {

// Restart s occupies its own block of round keys, so S = 1 replays a
// single call exactly.
uint64_t RoundKey(int s, int64_t step) {
  return (static_cast<uint64_t>(s) << 40) | static_cast<uint64_t>(step);
}

absl::StatusOr<RunResult> RunSvrg(const ProblemInstance& problem,
                                  const RunConfig& config, Algorithm algorithm) {
  auto created = internal::RunState::Create(problem, config, algorithm,
                                            TagFor(algorithm));
  if (!created.ok()) return created.status();
  internal::RunState& st = *created;
  const NoisePlan& plan = st.plan;
  const bool shuffle = IsShuffleAlgorithm(algorithm) && st.is_private();
  const int E = plan.epochs;
  const int Q = plan.epoch_length;
  const int K = plan.batch_size;
  const double L = plan.L;

  std::vector<double> anchor(st.d), agg(st.d), msg(st.d), v(st.d);
  ModelPoint wbar(st.d), chosen = st.w;
  int64_t steps = 0;
  int64_t pick = 0;
  for (int s = 0; s < plan.restarts; ++s) {
    RandomStream out_rng = st.Stream(s, 0, Purpose::kOutput);
    pick = static_cast<int64_t>(out_rng.UniformInt(static_cast<uint64_t>(E) * Q));
    for (int e = 0; e < E; ++e) {
      const uint64_t epoch_key = RoundKey(s, static_cast<int64_t>(e) * Q);
      const std::vector<int> silos = st.Available(epoch_key);
      const int m = static_cast<int>(silos.size());
      wbar = st.w;
      if (!shuffle) {
        std::fill(anchor.begin(), anchor.end(), 0.0);
        for (int i : silos) {
          MeanClippedGradient(st.f0(), st.data(), i, {}, wbar, L, msg);
          if (st.is_private()) {
            RandomStream rng = st.Stream(epoch_key, i, Purpose::kNoise, 0);
            AddGaussianNoise(msg, plan.effective.sigma1_sq, rng);
          }
          kernels::Axpy(1.0, msg, anchor);
        }
        kernels::Scale(1.0 / m, anchor);
        if (st.is_private()) {
          if (auto c = st.accountant.ChargeEpsilon(kGroupFirst, SvrgAnchorEpsilon(plan));
              !c.ok()) {
            return c;
          }
        }
      } else {
        auto mean = internal::ShuffleMean(st, 0, silos, epoch_key, 0, L, [&](int i) {
          return ClippedGradients(st.f0(), st.data(), i, {}, wbar, L);
        });
        if (!mean.ok()) return mean.status();
        anchor = *std::move(mean);
        if (auto c = st.accountant.ChargeEpsilon(kGroupFirst, st.ShuffleEpsilon(0, m));
            !c.ok()) {
          return c;
        }
      }

      for (int t = 0; t < Q; ++t) {
        const int64_t local = static_cast<int64_t>(e) * Q + t;
        if (local == pick) chosen = st.w;
        const uint64_t key = RoundKey(s, local);
        auto batch = [&](int i) {
          RandomStream rng = st.Stream(key, i, Purpose::kBatch);
          return SampleDistinct(st.n, K, rng);
        };
        if (!shuffle) {
          std::fill(agg.begin(), agg.end(), 0.0);
          for (int i : silos) {
            const std::vector<int> idx = batch(i);
            MeanClippedDifference(st.f0(), st.data(), i, idx, st.w, wbar, L,
                                  kNoClip, msg);
            if (st.is_private()) {
              RandomStream rng = st.Stream(key, i, Purpose::kNoise, 1);
              AddGaussianNoise(msg, plan.effective.sigma2_sq, rng);
            }
            kernels::Axpy(1.0, msg, agg);
          }
          kernels::Scale(1.0 / m, agg);
          if (st.is_private()) {
            if (auto c = st.accountant.ChargeEpsilon(kGroupSecond, SvrgInnerEpsilon(plan));
                !c.ok()) {
              return c;
            }
          }
        } else {
          auto mean = internal::ShuffleMean(st, 1, silos, key, 1, 2.0 * L, [&](int i) {
            return ClippedDifferences(st.f0(), st.data(), i, batch(i), st.w,
                                      wbar, L, kNoClip);
          });
          if (!mean.ok()) return mean.status();
          agg = *std::move(mean);
          const double rate = static_cast<double>(K) / st.n;
          if (auto c = st.accountant.ChargeEpsilon(
                  kGroupSecond, AmplifiedEpsilon(st.ShuffleEpsilon(1, m), rate));
              !c.ok()) {
            return c;
          }
        }
        for (int j = 0; j < st.d; ++j) v[j] = anchor[j] + agg[j];
        st.Step(st.w, v);
        ++steps;
      }
      if (auto c = st.Record(steps, st.w); !c.ok()) return c;
    }
    // The restart hands its uniformly drawn inner iterate to the next one.
    if (s + 1 < plan.restarts) st.w = chosen;
  }
  ModelPoint last = st.w;
  return st.Finish(last, chosen, pick);
}

}  // namespace

absl::StatusOr<RunResult> RunIsrlProxSvrg(const ProblemInstance& problem,
                                          const RunConfig& config) {
  return RunSvrg(problem, config, Algorithm::kIsrlSvrg);
}

absl::StatusOr<RunResult> RunIsrlProxPlSvrg(const ProblemInstance& problem,
                                            const RunConfig& config) {
  return RunSvrg(problem, config, Algorithm::kIsrlPlSvrg);
}

absl::StatusOr<RunResult> RunSdpProxSvrg(const ProblemInstance& problem,
                                         const RunConfig& config) {
  return RunSvrg(problem, config, Algorithm::kSdpSvrg);
}

absl::StatusOr<RunResult> RunSdpProxPlSvrg(const ProblemInstance& problem,
                                           const RunConfig& config) {
  return RunSvrg(problem, config, Algorithm::kSdpPlSvrg);
}

}  // namespace pfl
