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

#include "pfl/core/loss.h"

#include <cmath>
#include <limits>

#include "pfl/kernels/kernels.h"

namespace pfl {

absl::Status ValidateLoss(const CompositeLoss& loss) {
  if (loss.f0 == nullptr) return absl::InvalidArgumentError("loss has no f0");
  if (!(loss.lipschitz_L > 0.0)) {
    return absl::InvalidArgumentError("lipschitz_L must be > 0");
  }
  if (!(loss.smooth_beta > 0.0)) {
    return absl::InvalidArgumentError("smooth_beta must be > 0");
  }
  return ValidateRegularizer(loss.f1);
}

absl::StatusOr<std::vector<double>> ClipGradient(std::span<const double> g,
                                                 double L) {
  if (!(L > 0.0)) return absl::InvalidArgumentError("clip threshold must be > 0");
  if (auto s = ValidateFinite(g, "gradient"); !s.ok()) return s;
  std::vector<double> out(g.begin(), g.end());
  ClipInPlace(out, L);
  return out;
}

void ClipInPlace(std::span<double> g, double L) {
  if (!std::isfinite(L)) return;
  const double norm = std::sqrt(kernels::SquaredNorm(g));
  // The rescaled norm can land an ulp or two above L; treating that as
  // clipped keeps clip(clip(g)) == clip(g).
  if (norm > L * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    kernels::Scale(L / norm, g);
  }
}

void SiloMeanGradient(const SmoothLoss& f0, const FederatedDataset& data,
                      int silo, std::span<const int> indices,
                      std::span<const double> w, double clip,
                      std::span<double> out, std::span<double> scratch) {
  std::fill(out.begin(), out.end(), 0.0);
  const int count =
      indices.empty() ? data.records_per_silo() : static_cast<int>(indices.size());
  for (int t = 0; t < count; ++t) {
    const int j = indices.empty() ? t : indices[t];
    f0.Gradient(w, data.record(silo, j), scratch);
    ClipInPlace(scratch, clip);
    kernels::Axpy(1.0, scratch, out);
  }
  kernels::Scale(1.0 / count, out);
}

std::vector<double> EmpiricalGradient(const SmoothLoss& f0,
                                      const FederatedDataset& data,
                                      std::span<const double> w, double clip) {
  const size_t d = w.size();
  std::vector<double> total(d, 0.0), silo(d), scratch(d);
  for (int i = 0; i < data.num_silos(); ++i) {
    SiloMeanGradient(f0, data, i, {}, w, clip, silo, scratch);
    kernels::Axpy(1.0, silo, total);
  }
  kernels::Scale(1.0 / data.num_silos(), total);
  return total;
}

double EmpiricalSmoothRisk(const SmoothLoss& f0, const FederatedDataset& data,
                           std::span<const double> w) {
  double total = 0.0;
  for (int i = 0; i < data.num_silos(); ++i) {
    double s = 0.0;
    for (int j = 0; j < data.records_per_silo(); ++j) {
      s += f0.Value(w, data.record(i, j));
    }
    total += s / data.records_per_silo();
  }
  return total / data.num_silos();
}

}  // namespace pfl
