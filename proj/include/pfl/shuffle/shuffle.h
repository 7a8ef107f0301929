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

#ifndef PFL_SHUFFLE_SHUFFLE_H_
#define PFL_SHUFFLE_SHUFFLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/random.h"
#include "pfl/core/types.h"

namespace pfl {

// The randomizer's report in {0,1}^{g+b} is stored as its number of ones.
// The analyzer only sums bits, so this is equivalent after shuffling. This
// simulates the protocol's utility; it is not a hardened shuffler.
struct ScalarMessage {
  int64_t ones_count = 0;
};

struct LabeledMessage {
  int32_t coord = 0;
  ScalarMessage message;
};

absl::Status ValidateP1DParams(const P1DParams& params);

absl::StatusOr<ScalarMessage> RandomizeScalar(double x, double L,
                                              const P1DParams& params,
                                              RandomStream& rng);

// (L/g) * (sum of ones - p * b * n_contributors).
absl::StatusOr<double> AnalyzeScalar(std::span<const ScalarMessage> messages,
                                     const P1DParams& params,
                                     int64_t n_contributors, double L);

// Coordinate j encodes x_j + L on [0, 2L].
absl::StatusOr<std::vector<LabeledMessage>> RandomizeVector(
    std::span<const double> x, double L, const P1DParams& params,
    RandomStream& rng);

// Unbiased estimate of the sum of the encoded vectors: per-coordinate scalar
// analysis on range 2L, minus n_contributors * L.
absl::StatusOr<std::vector<double>> AnalyzeVector(
    std::span<const LabeledMessage> messages, int d, const P1DParams& params,
    int64_t n_contributors, double L);

// Parameter rule: p = 1/4, eps0 = eps / (2 sqrt(2 d ln(2/delta))),
// delta0 = delta / (2d), g = ceil(sqrt(N)) * ceil(1/eps0) capped at 2^16,
// b = ceil(64 g^2 ln(4/delta0) / (eps0^2 N)). Same params for every
// coordinate. L does not enter the rule; it only scales the encoding.
absl::StatusOr<P1DParams> ChooseParams(const PrivacyBudget& budget,
                                       int64_t n_contributors, int d,
                                       double L);

// Per-coordinate variance bound (2L/g)^2 * N * (1/4 + b p (1-p)).
double EstimatorVarianceBound(const P1DParams& params, int64_t n_contributors,
                              double L);

// Streaming form of RandomizeVector + AnalyzeVector used by the optimizers:
// keeps per-coordinate sums of ones counts instead of a message list.
class VectorSumProtocol {
 public:
  VectorSumProtocol(int d, double L, const P1DParams& params);
  // x must satisfy ||x|| <= L (tiny rounding excess is clamped).
  void Add(std::span<const double> x, RandomStream& rng);
  int64_t contributors() const { return contributors_; }
  std::vector<double> Estimate() const;

 private:
  int d_;
  double L_;
  P1DParams params_;
  int64_t contributors_ = 0;
  std::vector<int64_t> counts_;
};

}  // namespace pfl

#endif  // PFL_SHUFFLE_SHUFFLE_H_
