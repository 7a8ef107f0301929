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
#include <numeric>

#include "pfl/kernels/kernels.h"
#include "pfl/optimizers/messages.h"
#include "pfl/optimizers/optimizers.h"
#include "run_state.h"

namespace pfl {
namespace {

// Round r of silo i reads perm_i[rK .. rK+K) (mod n). Private plans have
// K R <= n, so batches never repeat a record.
class DisjointBatches {
 public:
  explicit DisjointBatches(const internal::RunState& st) : k_(st.plan.batch_size), n_(st.n) {
    if (k_ == n_) return;
    const int N = st.data().num_silos();
    perms_.resize(N);
    for (int i = 0; i < N; ++i) {
      RandomStream rng = st.Stream(0, i, Purpose::kBatch);
      perms_[i].resize(n_);
      std::iota(perms_[i].begin(), perms_[i].end(), 0);
      for (int t = n_ - 1; t > 0; --t) {
        std::swap(perms_[i][t], perms_[i][rng.UniformInt(t + 1)]);
      }
    }
  }

  std::vector<int> Get(int silo, int64_t round) const {
    if (k_ == n_) return {};
    std::vector<int> idx(k_);
    for (int j = 0; j < k_; ++j) {
      idx[j] = perms_[silo][(round * k_ + j) % n_];
    }
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  int k_;
  int n_;
  std::vector<std::vector<int>> perms_;
};

absl::StatusOr<RunResult> RunProxSgd(const ProblemInstance& problem,
                                     const RunConfig& config, bool sdp) {
  const Algorithm algorithm = sdp ? Algorithm::kSdpProxSgd : Algorithm::kIsrlProxSgd;
  auto created = internal::RunState::Create(problem, config, algorithm,
                                            TagFor(algorithm));
  if (!created.ok()) return created.status();
  internal::RunState& st = *created;
  const NoisePlan& plan = st.plan;
  const DisjointBatches batches(st);
  std::vector<double> h(st.d), msg(st.d);
  for (int r = 0; r < plan.rounds; ++r) {
    const std::vector<int> silos = st.Available(r);
    if (!sdp || !st.is_private()) {
      std::fill(h.begin(), h.end(), 0.0);
      for (int i : silos) {
        const std::vector<int> idx = batches.Get(i, r);
        MeanClippedGradient(st.f0(), st.data(), i, idx, st.w, plan.L, msg);
        if (st.is_private()) {
          RandomStream rng = st.Stream(r, i, Purpose::kNoise);
          AddGaussianNoise(msg, plan.effective.sigma_sq, rng);
        }
        kernels::Axpy(1.0, msg, h);
      }
      kernels::Scale(1.0 / silos.size(), h);
      if (st.is_private()) {
        if (auto s = st.accountant.ChargeRho(ProxSgdRoundRho(plan)); !s.ok()) return s;
      }
    } else {
      auto mean = internal::ShuffleMean(
          st, 0, silos, r, 0, plan.L, [&](int i) {
            return ClippedGradients(st.f0(), st.data(), i, batches.Get(i, r),
                                    st.w, plan.L);
          });
      if (!mean.ok()) return mean.status();
      h = *std::move(mean);
      const int m = static_cast<int>(silos.size());
      const double rate = static_cast<double>(m) / plan.dims.num_silos;
      if (auto s = st.accountant.ChargeEpsilon(
              0, AmplifiedEpsilon(st.ShuffleEpsilon(0, m), rate));
          !s.ok()) {
        return s;
      }
    }
    st.Step(st.w, h);
    if (auto s = st.Record(r + 1, st.w); !s.ok()) return s;
  }
  ModelPoint w = st.w;
  return st.Finish(w, w, plan.rounds);
}

}  // namespace

absl::StatusOr<RunResult> RunIsrlProxSgd(const ProblemInstance& problem,
                                         const RunConfig& config) {
  return RunProxSgd(problem, config, false);
}

absl::StatusOr<RunResult> RunSdpProxSgd(const ProblemInstance& problem,
                                        const RunConfig& config) {
  return RunProxSgd(problem, config, true);
}

}  // namespace pfl
