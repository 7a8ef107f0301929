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

#include "pfl/core/types.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "pfl/kernels/kernels.h"

namespace pfl {

absl::Status ValidateFinite(std::span<const double> v, const char* what) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " has a non-finite entry at index ", i));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateRegularizer(const RegularizerSpec& f1) {
  if (const auto* l1 = std::get_if<L1Reg>(&f1)) {
    if (!(l1->lambda >= 0.0) || !std::isfinite(l1->lambda)) {
      return absl::InvalidArgumentError("L1 lambda must be >= 0");
    }
  } else if (const auto* ball = std::get_if<BallReg>(&f1)) {
    if (!(ball->radius > 0.0) || !std::isfinite(ball->radius)) {
      return absl::InvalidArgumentError("ball radius must be > 0");
    }
  } else if (const auto* both = std::get_if<L1BallReg>(&f1)) {
    if (!(both->lambda >= 0.0) || !std::isfinite(both->lambda)) {
      return absl::InvalidArgumentError("L1 lambda must be >= 0");
    }
    if (!(both->radius > 0.0) || !std::isfinite(both->radius)) {
      return absl::InvalidArgumentError("ball radius must be > 0");
    }
  }
  return absl::OkStatus();
}

namespace {

double L1Norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return s;
}

// Small slack so prox outputs on the sphere count as feasible.
bool InBall(std::span<const double> w, double r) {
  return std::sqrt(kernels::SquaredNorm(w)) <= r * (1.0 + 1e-12);
}

}  // namespace

double RegularizerValue(const RegularizerSpec& f1, std::span<const double> w) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (const auto* l1 = std::get_if<L1Reg>(&f1)) return l1->lambda * L1Norm(w);
  if (const auto* ball = std::get_if<BallReg>(&f1)) {
    return InBall(w, ball->radius) ? 0.0 : kInf;
  }
  if (const auto* both = std::get_if<L1BallReg>(&f1)) {
    return InBall(w, both->radius) ? both->lambda * L1Norm(w) : kInf;
  }
  return 0.0;
}

std::string RegularizerName(const RegularizerSpec& f1) {
  switch (f1.index()) {
    case 1:
      return "l1";
    case 2:
      return "ball";
    case 3:
      return "l1_ball";
    default:
      return "zero";
  }
}

absl::Status ValidateBudget(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0) || !std::isfinite(budget.epsilon)) {
    return absl::InvalidArgumentError("epsilon must be > 0");
  }
  if (!(budget.delta > 0.0 && budget.delta < 0.5)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1/2)");
  }
  return absl::OkStatus();
}

std::string MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kIsrlGaussian:
      return "isrl_gaussian";
    case Mechanism::kShuffleBinomial:
      return "shuffle_binomial";
    case Mechanism::kNonPrivate:
      return "non_private";
  }
  return "unknown";
}

}  // namespace pfl
