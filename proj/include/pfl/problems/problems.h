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

#ifndef PFL_PROBLEMS_PROBLEMS_H_
#define PFL_PROBLEMS_PROBLEMS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/dataset.h"
#include "pfl/core/loss.h"
#include "pfl/core/random.h"
#include "pfl/core/types.h"

namespace pfl {

struct KnownOptimum {
  double f_star = 0.0;
  ModelPoint minimizer;
  double mu = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
};

// Draws one fresh record for `silo` from the generating distribution.
using PopulationSampler =
    std::function<void(int silo, RandomStream& rng, std::vector<double>& x,
                       double& y)>;

struct ProblemInstance {
  std::string family;
  CompositeLoss loss;
  FederatedDataset dataset;
  std::optional<KnownOptimum> known;
  PopulationSampler population;
  // Generator name, parameters and derived constants for the JSON dump.
  std::map<std::string, double> descriptor;

  int dim() const { return loss.f0->dim(); }
};

// Replaces f1. A known optimum only survives when f1 stays zero.
ProblemInstance WithRegularizer(ProblemInstance problem, RegularizerSpec f1);

struct QuadraticOptions {
  int num_silos = 5;
  int records_per_silo = 50;
  int dim = 10;
  double mu = 0.1;
  double beta = 1.0;
  double hetero_scale = 1.0;
  double record_spread = 1.0;
  uint64_t seed = 0;
};
// A = Q diag(linspace(mu, beta)) Q^T. Records of silo i are c_i plus
// Gaussian offsets centered to mean zero within the silo, so every silo mean
// is exactly its center. L is exact on the ball of radius 2 max ||x||.
absl::StatusOr<ProblemInstance> MakeQuadratic(const QuadraticOptions& options);

struct LeastSquaresOptions {
  int num_silos = 5;
  int records_per_silo = 50;
  int dim = 10;
  int rank_deficit = 0;
  double hetero_scale = 0.5;
  double label_noise = 0.1;
  uint64_t seed = 0;
};
absl::StatusOr<ProblemInstance> MakeLeastSquares(
    const LeastSquaresOptions& options);

struct LogisticOptions {
  int num_silos = 10;
  int records_per_silo = 500;
  int dim = 20;
  bool label_by_silo = true;
  double radius = 5.0;
  double separation = 1.0;
  uint64_t seed = 0;
};
absl::StatusOr<ProblemInstance> MakeLogistic(const LogisticOptions& options);

// Builds a problem around an existing dataset. family is "least_squares",
// "logistic" (labels must be +-1) or "quadratic" (A = I). Constants are
// computed from the data on the ball of the given radius.
absl::StatusOr<ProblemInstance> ProblemFromDataset(FederatedDataset dataset,
                                                   const std::string& family,
                                                   double radius);

struct CsvSchema {
  int d_features = 0;  // 0 infers from the first row
  bool has_label = false;
  bool truncate = false;  // trim silos to the smallest count
};

// Rows: silo_id, features..., [label]. An optional header row starting with
// "silo_id" is skipped. Silo ids are mapped to 0..N-1 in ascending order.
absl::StatusOr<FederatedDataset> LoadCsv(const std::string& path,
                                         const CsvSchema& schema);
absl::Status SaveCsv(const FederatedDataset& data, const std::string& path);

struct Metrics {
  double empirical_risk = 0.0;
  std::optional<double> excess_risk;
  double grad_mapping_norm_sq = 0.0;
  std::optional<double> population_risk;
  std::optional<double> population_se;
};

// population_samples > 0 estimates the population risk when the problem has
// a sampler, drawing that many records per silo.
absl::StatusOr<Metrics> Evaluate(const ProblemInstance& problem,
                                 std::span<const double> w, double eta,
                                 int population_samples = 0,
                                 uint64_t seed = 0);

struct HeterogeneityReport {
  double upsilon_sq = 0.0;
};

HeterogeneityReport Heterogeneity(const ProblemInstance& problem,
                                  const std::vector<ModelPoint>& probes);

}  // namespace pfl

#endif  // PFL_PROBLEMS_PROBLEMS_H_
