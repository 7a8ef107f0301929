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

#ifndef PFL_HARNESS_RESULTS_CSV_H_
#define PFL_HARNESS_RESULTS_CSV_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/types.h"

namespace pfl {

inline constexpr char kResultsHeader[] =
    "algorithm,epsilon,seed,round,train_risk,excess_risk,grad_map_norm_sq,"
    "epsilon_spent,wall_ms";

struct ResultRow {
  std::string algorithm;
  double epsilon = 0.0;
  uint64_t seed = 0;
  bool infeasible = false;  // round reads "infeasible", metrics empty
  RoundRecord record;
};

// Numbers use %.17g so a read-back is exact. Non-finite values are written
// as inf/-inf/nan and an absent excess risk as an empty field.
std::string FormatResultsCsv(const std::vector<ResultRow>& rows);
absl::Status WriteResultsCsv(const std::string& path,
                             const std::vector<ResultRow>& rows);
absl::StatusOr<std::vector<ResultRow>> ParseResultsCsv(const std::string& text);
absl::StatusOr<std::vector<ResultRow>> ReadResultsCsv(const std::string& path);

}  // namespace pfl

#endif  // PFL_HARNESS_RESULTS_CSV_H_
