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

#ifndef PFL_HARNESS_EXPERIMENT_H_
#define PFL_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/harness/config.h"
#include "pfl/harness/results_csv.h"
#include "pfl/privacy/noise_plan.h"

namespace pfl {

struct CellResult {
  Algorithm algorithm = Algorithm::kIsrlProxSgd;
  double epsilon = 0.0;  // inf for non-private cells
  uint64_t seed = 0;
  absl::Status status;  // not ok means the cell is infeasible
  std::optional<NoisePlan> plan;
  RunResult run;
};

struct ExperimentResult {
  ProblemInstance problem;
  std::vector<CellResult> cells;  // sorted by algorithm, epsilon, seed
};

// Seed used by repeat k of base seed s. Repeat 0 keeps s.
uint64_t RepeatSeed(uint64_t base, int repeat);

// Runs every (algorithm, epsilon, seed, repeat) cell on up to `threads`
// workers. Only a problem build failure is an error; per-cell failures are
// kept in CellResult::status.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentSpec& spec,
                                               int threads);

std::vector<ResultRow> ResultRows(const ExperimentResult& result);

// Sidecar JSON: resolved config, problem descriptor, per-cell plan, status
// and diagnostics.
std::string ExperimentSidecarJson(const ExperimentSpec& spec,
                                  const ExperimentResult& result);

// Writes <path> (CSV) and <path>.json.
absl::Status WriteExperimentOutputs(const ExperimentSpec& spec,
                                    const ExperimentResult& result,
                                    const std::string& path);

}  // namespace pfl

#endif  // PFL_HARNESS_EXPERIMENT_H_
