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

#include "pfl/privacy/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace pfl {

absl::StatusOr<double> GaussianSigmaSq(double sensitivity,
                                       const PrivacyBudget& budget) {
  if (auto s = ValidateBudget(budget); !s.ok()) return s;
  if (!(sensitivity >= 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be >= 0");
  }
  const double log_inv_delta = std::log(1.0 / budget.delta);
  if (budget.epsilon > 2.0 * log_inv_delta) {
    return absl::InvalidArgumentError(absl::StrCat(
        "constraint eps <= 2 ln(1/delta) violated: eps=", budget.epsilon,
        ", 2 ln(1/delta)=", 2.0 * log_inv_delta));
  }
  return 4.0 * sensitivity * sensitivity * log_inv_delta /
         (budget.epsilon * budget.epsilon);
}

absl::StatusOr<double> ZcdpToDp(double rho, double delta) {
  if (!(rho >= 0.0)) return absl::InvalidArgumentError("rho must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

double GaussianRho(double sensitivity, double sigma_sq) {
  if (sensitivity == 0.0) return 0.0;
  if (sigma_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return sensitivity * sensitivity / (2.0 * sigma_sq);
}

double ClassicGaussianEpsilon(double sensitivity, double sigma_sq,
                              double delta) {
  if (sensitivity == 0.0) return 0.0;
  if (sigma_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta) / sigma_sq);
}

absl::Status ZcdpLedger::Charge(double rho) {
  if (!(rho >= 0.0)) return absl::InvalidArgumentError("rho must be >= 0");
  entries_.push_back(rho);
  total_ += rho;
  return absl::OkStatus();
}

absl::StatusOr<ZcdpLedger> ComposeZcdp(ZcdpLedger ledger, double rho_new) {
  if (auto s = ledger.Charge(rho_new); !s.ok()) return s;
  return ledger;
}

absl::StatusOr<DpGuarantee> AdvancedComposition(double eps, double delta,
                                                int64_t rounds,
                                                double delta_prime) {
  if (!(eps >= 0.0) || !(delta >= 0.0) || rounds < 1 ||
      !(delta_prime > 0.0 && delta_prime < 1.0)) {
    return absl::InvalidArgumentError(
        "advanced composition needs eps, delta >= 0, R >= 1, delta' in (0,1)");
  }
  const double r = static_cast<double>(rounds);
  DpGuarantee out;
  out.epsilon = std::sqrt(2.0 * r * std::log(1.0 / delta_prime)) * eps +
                r * eps * std::expm1(eps);
  out.delta = r * delta + delta_prime;
  return out;
}

absl::StatusOr<double> AmplifyBySubsampling(double eps, double rate) {
  if (!(eps >= 0.0) || !(rate >= 0.0 && rate <= 1.0)) {
    return absl::InvalidArgumentError("need eps >= 0 and rate in [0, 1]");
  }
  if (eps > 1.0) {
    return absl::InvalidArgumentError(
        "subsampling amplification requires eps <= 1");
  }
  return 2.0 * rate * eps;
}

absl::StatusOr<DpGuarantee> IsrlToUserLevel(double eps, double delta,
                                            int64_t n) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(eps >= 0.0) || !(delta >= 0.0)) {
    return absl::InvalidArgumentError("need eps, delta >= 0");
  }
  const double nn = static_cast<double>(n);
  return DpGuarantee{nn * eps, nn * std::exp((nn - 1.0) * eps) * delta};
}

absl::StatusOr<double> UpdateSensitivity(const UpdateKind& kind, double L) {
  if (!(L > 0.0)) return absl::InvalidArgumentError("L must be > 0");
  if (const auto* k = std::get_if<SgdBatch>(&kind)) {
    if (k->k < 1) return absl::InvalidArgumentError("K must be >= 1");
    return 2.0 * L / static_cast<double>(k->k);
  }
  if (const auto* k = std::get_if<SvrgDiff>(&kind)) {
    if (k->k < 1) return absl::InvalidArgumentError("K must be >= 1");
    return 4.0 * L / static_cast<double>(k->k);
  }
  if (const auto* k = std::get_if<SpiderFull>(&kind)) {
    if (k->n < 1) return absl::InvalidArgumentError("n must be >= 1");
    return 2.0 * L / static_cast<double>(k->n);
  }
  const auto& k = std::get<SpiderDiff>(kind);
  if (k.n < 1 || !(k.beta > 0.0) || !(k.step_norm >= 0.0)) {
    return absl::InvalidArgumentError("SpiderDiff needs n >= 1, beta > 0");
  }
  return std::min(2.0 * k.beta * k.step_norm, 4.0 * L) /
         static_cast<double>(k.n);
}

}  // namespace pfl
