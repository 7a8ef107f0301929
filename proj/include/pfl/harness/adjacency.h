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

#ifndef PFL_HARNESS_ADJACENCY_H_
#define PFL_HARNESS_ADJACENCY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/types.h"
#include "pfl/privacy/noise_plan.h"
#include "pfl/problems/problems.h"

namespace pfl {

// One message type of one algorithm. For Gaussian messages `declared` is the
// l2 sensitivity the noise is calibrated to and `max_observed` the largest
// ||msg(D) - msg(D')|| over record swaps. For shuffle inputs it is the
// protocol range and the largest per-record input norm.
struct AdjacencyCheck {
  std::string algorithm;
  std::string message;
  double declared = 0.0;
  double max_observed = 0.0;
  int trials = 0;
  bool ok = false;
};

// Swaps one record of one silo `trials` times, half with a record from
// another silo and half with a reflected far-away point, at random w and
// w_prev. Batches always include the swapped record.
absl::StatusOr<std::vector<AdjacencyCheck>> ProbeAdjacency(
    const ProblemInstance& problem, Algorithm algorithm,
    const RunConfig& config, int trials, uint64_t seed);

}  // namespace pfl

#endif  // PFL_HARNESS_ADJACENCY_H_
