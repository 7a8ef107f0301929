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
#include "pfl/prox/prox.h"
#include "run_state.h"

namespace pfl {
namespace {

absl::StatusOr<RunResult> RunLocalSgd(const ProblemInstance& problem,
                                      const RunConfig& config) {
  const Algorithm algorithm = Algorithm::kLocalSgd;
  auto created =
      internal::RunState::Create(problem, config, algorithm, TagFor(algorithm));
  if (!created.ok()) return created.status();
  internal::RunState& st = *created;
  const NoisePlan& plan = st.plan;
  const double eta = plan.step_size;
  std::vector<double> agg(st.d), local(st.d), g(st.d);
  for (int r = 0; r < plan.rounds; ++r) {
    const std::vector<int> silos = st.Available(r);
    std::fill(agg.begin(), agg.end(), 0.0);
    for (int i : silos) {
      local = st.w;
      for (int t = 0; t < plan.local_steps; ++t) {
        RandomStream brng = st.Stream(r, i, Purpose::kBatch, t);
        const std::vector<int> idx = SampleDistinct(st.n, plan.batch_size, brng);
        MeanClippedGradient(st.f0(), st.data(), i, idx, local, plan.L, g);
        if (st.is_private()) {
          RandomStream rng = st.Stream(r, i, Purpose::kNoise, t);
          AddGaussianNoise(g, plan.effective.sigma_sq, rng);
        }
        kernels::Axpy(-eta, g, local);
      }
      kernels::Axpy(1.0, local, agg);
    }
    kernels::Scale(1.0 / silos.size(), agg);
    ProxInPlace(problem.loss.f1, eta, agg);
    st.w = agg;
    if (st.is_private()) {
      for (int t = 0; t < plan.local_steps; ++t) {
        if (auto c = st.accountant.ChargeRho(LocalSgdStepRho(plan)); !c.ok()) return c;
      }
    }
    if (auto c = st.Record(r + 1, st.w); !c.ok()) return c;
  }
  ModelPoint w = st.w;
  return st.Finish(w, w, plan.rounds);
}

}  // namespace

absl::StatusOr<RunResult> RunBaseline(BaselineKind kind, bool private_run,
                                      const ProblemInstance& problem,
                                      const RunConfig& config) {
  RunConfig c = config;
  if (!private_run) {
    c.mechanism = Mechanism::kNonPrivate;
  } else if (c.mechanism == Mechanism::kNonPrivate) {
    c.mechanism = Mechanism::kIsrlGaussian;
  }
  if (kind == BaselineKind::kMbSgd) {
    return internal::RunSpiderCore(problem, c, Algorithm::kMbSgd);
  }
  return RunLocalSgd(problem, c);
}

}  // namespace pfl
