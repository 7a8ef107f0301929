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

#include "pfl/problems/losses.h"

#include <cmath>

#include "pfl/kernels/kernels.h"

namespace pfl {
namespace {

std::vector<double>& Scratch(size_t d) {
  thread_local std::vector<double> buf;
  if (buf.size() < d) buf.resize(d);
  return buf;
}

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

QuadraticLoss::QuadraticLoss(int d, std::vector<double> a)
    : d_(d), a_(std::move(a)) {}

double QuadraticLoss::Value(std::span<const double> w,
                            const RecordView& r) const {
  std::vector<double>& diff = Scratch(d_);
  std::span<double> u(diff.data(), d_);
  kernels::Sub(w, r.x, u);
  double s = 0.0;
  for (int i = 0; i < d_; ++i) {
    s += u[i] * kernels::Dot(std::span<const double>(a_).subspan(i * d_, d_), u);
  }
  return 0.5 * s;
}

void QuadraticLoss::Gradient(std::span<const double> w, const RecordView& r,
                             std::span<double> grad) const {
  std::vector<double>& diff = Scratch(d_);
  std::span<double> u(diff.data(), d_);
  kernels::Sub(w, r.x, u);
  for (int i = 0; i < d_; ++i) {
    grad[i] = kernels::Dot(std::span<const double>(a_).subspan(i * d_, d_), u);
  }
}

double LeastSquaresLoss::Value(std::span<const double> w,
                               const RecordView& r) const {
  const double e = kernels::Dot(r.x, w) - r.y;
  return 0.5 * e * e;
}

void LeastSquaresLoss::Gradient(std::span<const double> w, const RecordView& r,
                                std::span<double> grad) const {
  const double e = kernels::Dot(r.x, w) - r.y;
  std::copy(r.x.begin(), r.x.end(), grad.begin());
  kernels::Scale(e, grad);
}

double LogisticLoss::Value(std::span<const double> w,
                           const RecordView& r) const {
  return Softplus(-r.y * kernels::Dot(r.x, w));
}

void LogisticLoss::Gradient(std::span<const double> w, const RecordView& r,
                            std::span<double> grad) const {
  const double margin = r.y * kernels::Dot(r.x, w);
  std::copy(r.x.begin(), r.x.end(), grad.begin());
  kernels::Scale(-r.y * Sigmoid(-margin), grad);
}

}  // namespace pfl
