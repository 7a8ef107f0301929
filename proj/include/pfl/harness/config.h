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

#ifndef PFL_HARNESS_CONFIG_H_
#define PFL_HARNESS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/types.h"
#include "pfl/privacy/noise_plan.h"
#include "pfl/problems/problems.h"

namespace pfl {

inline constexpr int kSchemaVersion = 1;

struct ProblemSpec {
  std::string generator = "quadratic";  // quadratic | least_squares | logistic | csv
  QuadraticOptions quadratic;
  LeastSquaresOptions least_squares;
  LogisticOptions logistic;
  std::string csv_path;
  std::string csv_family = "least_squares";
  CsvSchema csv_schema;
  double csv_radius = 1.0;
  std::optional<RegularizerSpec> regularizer;  // replaces the generator's f1
};

absl::StatusOr<ProblemInstance> BuildProblem(const ProblemSpec& spec);

enum class DeltaRule { kFixed, kOneOverNSq };

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<Algorithm> algorithms;
  std::vector<double> epsilons;
  DeltaRule delta_rule = DeltaRule::kOneOverNSq;
  double delta = 1e-5;  // used by the fixed rule
  int repeats = 1;
  std::vector<uint64_t> seeds;
  bool private_runs = true;
  std::string output;
  RunConfig run;  // privacy and mechanism are set per cell
};

// Parses the JSON config. Unknown keys and a wrong schema_version fail.
absl::StatusOr<ExperimentSpec> ParseExperimentSpec(const std::string& json_text);
absl::StatusOr<ExperimentSpec> LoadExperimentSpec(const std::string& path);

// Resolved spec as JSON text; parses back to the same spec.
std::string ExperimentSpecToJson(const ExperimentSpec& spec);

double ResolveDelta(const ExperimentSpec& spec, int records_per_silo);

// The per-cell run config: budget, mechanism and seed filled in.
RunConfig CellConfig(const ExperimentSpec& spec, Algorithm algorithm,
                     double epsilon, uint64_t seed, int records_per_silo);

// NoisePlan as JSON text (check-privacy output).
std::string NoisePlanToJson(const NoisePlan& plan);

}  // namespace pfl

#endif  // PFL_HARNESS_CONFIG_H_
