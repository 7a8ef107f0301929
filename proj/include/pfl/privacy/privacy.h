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

#ifndef PFL_PRIVACY_PRIVACY_H_
#define PFL_PRIVACY_PRIVACY_H_

#include <cstdint>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "pfl/core/types.h"

namespace pfl {

// 4 * Delta^2 * ln(1/delta) / eps^2. Requires eps <= 2 ln(1/delta).
absl::StatusOr<double> GaussianSigmaSq(double sensitivity,
                                       const PrivacyBudget& budget);

// rho-zCDP => (rho + 2 sqrt(rho ln(1/delta)), delta)-DP.
absl::StatusOr<double> ZcdpToDp(double rho, double delta);

// rho of a Gaussian release: Delta^2 / (2 sigma^2). Infinite when sigma is 0
// and Delta is not.
double GaussianRho(double sensitivity, double sigma_sq);

// Classic (eps, delta) bound for one Gaussian release,
// eps = Delta * sqrt(2 ln(1.25/delta)) / sigma. Only meaningful for eps < 1.
double ClassicGaussianEpsilon(double sensitivity, double sigma_sq, double delta);

class ZcdpLedger {
 public:
  absl::Status Charge(double rho);
  double total() const { return total_; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  std::vector<double> entries_;
  double total_ = 0.0;
};

absl::StatusOr<ZcdpLedger> ComposeZcdp(ZcdpLedger ledger, double rho_new);

struct DpGuarantee {
  double epsilon = 0.0;
  double delta = 0.0;
};

// R-fold adaptive composition of (eps, delta)-DP mechanisms.
absl::StatusOr<DpGuarantee> AdvancedComposition(double eps, double delta,
                                                int64_t rounds,
                                                double delta_prime);

// 2 * rate * eps. Requires eps <= 1.
absl::StatusOr<double> AmplifyBySubsampling(double eps, double rate);

// Record-level to user-level with n records per user.
absl::StatusOr<DpGuarantee> IsrlToUserLevel(double eps, double delta,
                                            int64_t n);

struct SgdBatch {
  int64_t k = 1;
};
struct SvrgDiff {
  int64_t k = 1;
};
struct SpiderFull {
  int64_t n = 1;
};
struct SpiderDiff {
  int64_t n = 1;
  double beta = 1.0;
  double step_norm = 0.0;
};
using UpdateKind = std::variant<SgdBatch, SvrgDiff, SpiderFull, SpiderDiff>;

absl::StatusOr<double> UpdateSensitivity(const UpdateKind& kind, double L);

}  // namespace pfl

#endif  // PFL_PRIVACY_PRIVACY_H_
