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

#ifndef PFL_PROX_PROX_H_
#define PFL_PROX_PROX_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/dataset.h"
#include "pfl/core/loss.h"
#include "pfl/core/types.h"

namespace pfl {

// argmin_y eta * f1(y) + 0.5 * ||y - z||^2.
//
// L1BallReg is soft-thresholding followed by projection. This is exact: with
// s = soft(z, eta * lambda), any y = c * s with c > 0 has the same sign
// pattern as s, so the optimality condition reduces to choosing c for the
// ball constraint.
absl::StatusOr<std::vector<double>> Prox(const RegularizerSpec& f1, double eta,
                                         std::span<const double> z);
// Unchecked in-place variant used inside optimizer loops.
void ProxInPlace(const RegularizerSpec& f1, double eta, std::span<double> z);

struct GradientMapping {
  std::vector<double> vector;
  double norm_sq = 0.0;
};

// (w - prox_{eta f1}(w - eta * grad)) / eta for a precomputed gradient.
// Returns `grad` itself when f1 is zero.
absl::StatusOr<GradientMapping> GradientMappingFromGradient(
    const RegularizerSpec& f1, std::span<const double> w,
    std::span<const double> grad, double eta);

// Same, with the full unclipped empirical gradient of f0 over all records.
absl::StatusOr<GradientMapping> ComputeGradientMapping(
    const CompositeLoss& loss, std::span<const double> w, double eta,
    const FederatedDataset& data);

// RHS - LHS of the proximal-PL inequality at w:
//   -beta * min_y [<g, y - w> + beta/2 ||y - w||^2 + f1(y) - f1(w)]
//     - mu * (F(w) - F*).
// The minimizer is prox_{f1/beta}(w - g/beta), so no iterative solve is
// needed.
absl::StatusOr<double> PplResidual(const CompositeLoss& loss,
                                   const FederatedDataset& data,
                                   std::span<const double> w, double mu,
                                   double beta, double f_star);

}  // namespace pfl

#endif  // PFL_PROX_PROX_H_
