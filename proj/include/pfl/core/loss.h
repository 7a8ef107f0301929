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

#ifndef PFL_CORE_LOSS_H_
#define PFL_CORE_LOSS_H_

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/dataset.h"
#include "pfl/core/types.h"

namespace pfl {

// Per-sample smooth part f0(w, x).
class SmoothLoss {
 public:
  virtual ~SmoothLoss() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual double Value(std::span<const double> w, const RecordView& r) const = 0;
  virtual void Gradient(std::span<const double> w, const RecordView& r,
                        std::span<double> grad) const = 0;
};

struct CompositeLoss {
  std::shared_ptr<const SmoothLoss> f0;
  double lipschitz_L = 1.0;
  double smooth_beta = 1.0;
  RegularizerSpec f1 = ZeroReg{};
};

absl::Status ValidateLoss(const CompositeLoss& loss);

inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

absl::StatusOr<std::vector<double>> ClipGradient(std::span<const double> g,
                                                 double L);
// In-place variant for hot loops; assumes finite input and L > 0.
void ClipInPlace(std::span<double> g, double L);

// Mean of clipped per-sample gradients of silo `silo` over `indices`
// (all records when empty). Written to `out`; `scratch` has size d.
void SiloMeanGradient(const SmoothLoss& f0, const FederatedDataset& data,
                      int silo, std::span<const int> indices,
                      std::span<const double> w, double clip,
                      std::span<double> out, std::span<double> scratch);

// Gradient of the full empirical smooth risk: silo means averaged in
// ascending silo order.
std::vector<double> EmpiricalGradient(const SmoothLoss& f0,
                                      const FederatedDataset& data,
                                      std::span<const double> w,
                                      double clip = kNoClip);
double EmpiricalSmoothRisk(const SmoothLoss& f0, const FederatedDataset& data,
                           std::span<const double> w);

}  // namespace pfl

#endif  // PFL_CORE_LOSS_H_
