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

#ifndef PFL_SRC_OPTIMIZERS_RUN_STATE_H_
#define PFL_SRC_OPTIMIZERS_RUN_STATE_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/optimizers/optimizers.h"
#include "pfl/privacy/noise_plan.h"

namespace pfl {
namespace internal {

// Shared per-run plumbing: plan, accountant, streams, rows.
struct RunState {
  const ProblemInstance* problem = nullptr;
  RunConfig config;
  NoisePlan plan;
  AlgorithmTag tag = AlgorithmTag::kNone;
  std::optional<AvailabilitySampler> availability;
  PrivacyAccountant accountant;
  RunResult result;
  ModelPoint w;
  int d = 0;
  int n = 0;
  std::chrono::steady_clock::time_point start;
  std::map<std::pair<int, int>, P1DParams> params_cache;

  static absl::StatusOr<RunState> Create(const ProblemInstance& problem,
                                         const RunConfig& config,
                                         Algorithm algorithm,
                                         AlgorithmTag tag);

  bool is_private() const { return plan.mechanism != Mechanism::kNonPrivate; }
  const SmoothLoss& f0() const { return *problem->loss.f0; }
  const FederatedDataset& data() const { return problem->dataset; }

  RandomStream Stream(uint64_t round, uint64_t silo, Purpose purpose,
                      uint64_t draw = 0) const;
  std::vector<int> Available(uint64_t round) const {
    return availability->Draw(round);
  }

  // w <- prox_{eta f1}(w - eta h)
  void Step(std::span<double> x, std::span<const double> h) const;

  absl::Status Record(int64_t round, std::span<const double> x);

  // P1D params for call `call` of the plan when m_r silos take part.
  absl::StatusOr<P1DParams> ShuffleParams(int call, int m_r);
  // Per-call epsilon when m_r silos take part.
  double ShuffleEpsilon(int call, int m_r) const;

  RunResult Finish(ModelPoint final_model, ModelPoint w_priv,
                   int64_t w_priv_index);
};

// Runs the vector summation protocol over the per-record inputs of every
// silo in `silos` and returns the estimate divided by the input count.
// inputs(silo) returns a row-major count x d block with row norms <= range.
absl::StatusOr<std::vector<double>> ShuffleMean(
    RunState& st, int call, const std::vector<int>& silos, uint64_t round_key,
    uint64_t draw, double range,
    const std::function<std::vector<double>(int)>& inputs);

// SPIDER loop shared by ISRL SPIDER, SDP SPIDER and MB-SGD (q = 1).
absl::StatusOr<RunResult> RunSpiderCore(const ProblemInstance& problem,
                                        const RunConfig& config,
                                        Algorithm algorithm);

}  // namespace internal
}  // namespace pfl

#endif  // PFL_SRC_OPTIMIZERS_RUN_STATE_H_
