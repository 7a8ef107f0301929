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

#ifndef PFL_OPTIMIZERS_OPTIMIZERS_H_
#define PFL_OPTIMIZERS_OPTIMIZERS_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/random.h"
#include "pfl/core/types.h"
#include "pfl/privacy/noise_plan.h"
#include "pfl/problems/problems.h"

namespace pfl {

ProblemDims DimsOf(const ProblemInstance& problem);

// Draws the available silo set S_r for each round. Fixed mode picks M silos
// uniformly; random mode first picks M_r uniformly from the configured set.
class AvailabilitySampler {
 public:
  static absl::StatusOr<AvailabilitySampler> Create(int num_silos,
                                                    const Availability& mode,
                                                    uint64_t seed,
                                                    AlgorithmTag tag);

  // Ascending silo ids. Depends only on (seed, tag, round).
  std::vector<int> Draw(uint64_t round) const;
  // E[1/M_r].
  double MeanInverse() const;

 private:
  AvailabilitySampler() = default;

  int num_silos_ = 0;
  std::vector<int> m_values_;
  uint64_t seed_ = 0;
  AlgorithmTag tag_ = AlgorithmTag::kNone;
};

absl::StatusOr<RunResult> RunIsrlProxSgd(const ProblemInstance& problem,
                                         const RunConfig& config);
absl::StatusOr<RunResult> RunSdpProxSgd(const ProblemInstance& problem,
                                        const RunConfig& config);

absl::StatusOr<RunResult> RunIsrlProxSvrg(const ProblemInstance& problem,
                                          const RunConfig& config);
absl::StatusOr<RunResult> RunIsrlProxPlSvrg(const ProblemInstance& problem,
                                            const RunConfig& config);
absl::StatusOr<RunResult> RunSdpProxSvrg(const ProblemInstance& problem,
                                         const RunConfig& config);
absl::StatusOr<RunResult> RunSdpProxPlSvrg(const ProblemInstance& problem,
                                           const RunConfig& config);

absl::StatusOr<RunResult> RunIsrlSpider(const ProblemInstance& problem,
                                        const RunConfig& config);
absl::StatusOr<RunResult> RunSdpSpider(const ProblemInstance& problem,
                                       const RunConfig& config);
absl::StatusOr<RunResult> RunIsrlSpiderAlt(const ProblemInstance& problem,
                                           const RunConfig& config);

enum class BaselineKind { kMbSgd, kLocalSgd };

// private_run = false forces the non-private mechanism.
absl::StatusOr<RunResult> RunBaseline(BaselineKind kind, bool private_run,
                                      const ProblemInstance& problem,
                                      const RunConfig& config);

absl::StatusOr<RunResult> RunAlgorithm(Algorithm algorithm,
                                       const ProblemInstance& problem,
                                       const RunConfig& config);

AlgorithmTag TagFor(Algorithm algorithm);

}  // namespace pfl

#endif  // PFL_OPTIMIZERS_OPTIMIZERS_H_
