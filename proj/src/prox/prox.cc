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

#include "pfl/prox/prox.h"

#include <cmath>
#include <limits>

#include "pfl/kernels/kernels.h"

namespace pfl {
namespace {

void SoftThreshold(double t, std::span<double> z) {
  for (double& v : z) {
    if (v > t) {
      v -= t;
    } else if (v < -t) {
      v += t;
    } else {
      v = 0.0;
    }
  }
}

void ProjectBall(double r, std::span<double> z) {
  const double norm = std::sqrt(kernels::SquaredNorm(z));
  if (norm > r) kernels::Scale(r / norm, z);
}

}  // namespace

void ProxInPlace(const RegularizerSpec& f1, double eta, std::span<double> z) {
  if (const auto* l1 = std::get_if<L1Reg>(&f1)) {
    SoftThreshold(eta * l1->lambda, z);
  } else if (const auto* ball = std::get_if<BallReg>(&f1)) {
    ProjectBall(ball->radius, z);
  } else if (const auto* both = std::get_if<L1BallReg>(&f1)) {
    SoftThreshold(eta * both->lambda, z);
    ProjectBall(both->radius, z);
  }
}

absl::StatusOr<std::vector<double>> Prox(const RegularizerSpec& f1, double eta,
                                         std::span<const double> z) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError("prox step eta must be > 0");
  }
  if (auto s = ValidateRegularizer(f1); !s.ok()) return s;
  if (auto s = ValidateFinite(z, "prox input"); !s.ok()) return s;
  std::vector<double> out(z.begin(), z.end());
  ProxInPlace(f1, eta, out);
  return out;
}

absl::StatusOr<GradientMapping> GradientMappingFromGradient(
    const RegularizerSpec& f1, std::span<const double> w,
    std::span<const double> grad, double eta) {
  GradientMapping gm;
  if (std::holds_alternative<ZeroReg>(f1)) {
    if (!(eta > 0.0)) return absl::InvalidArgumentError("eta must be > 0");
    gm.vector.assign(grad.begin(), grad.end());
  } else {
    std::vector<double> z(w.begin(), w.end());
    kernels::Axpy(-eta, grad, z);
    auto p = Prox(f1, eta, z);
    if (!p.ok()) return p.status();
    gm.vector.resize(w.size());
    kernels::Sub(w, *p, gm.vector);
    kernels::Scale(1.0 / eta, gm.vector);
  }
  gm.norm_sq = kernels::SquaredNorm(gm.vector);
  return gm;
}

absl::StatusOr<GradientMapping> ComputeGradientMapping(
    const CompositeLoss& loss, std::span<const double> w, double eta,
    const FederatedDataset& data) {
  if (auto s = ValidateFinite(w, "w"); !s.ok()) return s;
  const std::vector<double> grad = EmpiricalGradient(*loss.f0, data, w);
  return GradientMappingFromGradient(loss.f1, w, grad, eta);
}

absl::StatusOr<double> PplResidual(const CompositeLoss& loss,
                                   const FederatedDataset& data,
                                   std::span<const double> w, double mu,
                                   double beta, double f_star) {
  if (!(mu > 0.0) || !(beta >= mu)) {
    return absl::InvalidArgumentError("need beta >= mu > 0");
  }
  if (!std::isfinite(f_star)) {
    return absl::InvalidArgumentError("F* must be supplied");
  }
  const std::vector<double> g = EmpiricalGradient(*loss.f0, data, w);
  const double f1_w = RegularizerValue(loss.f1, w);
  if (!std::isfinite(f1_w)) return std::numeric_limits<double>::infinity();

  std::vector<double> y(w.begin(), w.end());
  kernels::Axpy(-1.0 / beta, g, y);
  ProxInPlace(loss.f1, 1.0 / beta, y);
  std::vector<double> step(w.size());
  kernels::Sub(y, w, step);
  const double inner = kernels::Dot(g, step) +
                       0.5 * beta * kernels::SquaredNorm(step) +
                       RegularizerValue(loss.f1, y) - f1_w;
  // D(w, beta) = -2 beta * inner; the inequality's right side is D / 2.
  const double rhs = -beta * inner;
  const double gap =
      EmpiricalSmoothRisk(*loss.f0, data, w) + f1_w - f_star;
  return rhs - mu * gap;
}

}  // namespace pfl
