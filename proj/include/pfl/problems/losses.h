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

#ifndef PFL_PROBLEMS_LOSSES_H_
#define PFL_PROBLEMS_LOSSES_H_

#include <string>
#include <vector>

#include "pfl/core/loss.h"

namespace pfl {

// f0(w, x) = 0.5 (w - x)^T A (w - x), A symmetric, row-major.
class QuadraticLoss : public SmoothLoss {
 public:
  QuadraticLoss(int d, std::vector<double> a);
  std::string name() const override { return "quadratic"; }
  int dim() const override { return d_; }
  double Value(std::span<const double> w, const RecordView& r) const override;
  void Gradient(std::span<const double> w, const RecordView& r,
                std::span<double> grad) const override;
  const std::vector<double>& matrix() const { return a_; }

 private:
  int d_;
  std::vector<double> a_;
};

// f0(w, (a, y)) = 0.5 (<a, w> - y)^2.
class LeastSquaresLoss : public SmoothLoss {
 public:
  explicit LeastSquaresLoss(int d) : d_(d) {}
  std::string name() const override { return "least_squares"; }
  int dim() const override { return d_; }
  double Value(std::span<const double> w, const RecordView& r) const override;
  void Gradient(std::span<const double> w, const RecordView& r,
                std::span<double> grad) const override;

 private:
  int d_;
};

// f0(w, (a, y)) = log(1 + exp(-y <a, w>)), y in {-1, +1}.
class LogisticLoss : public SmoothLoss {
 public:
  explicit LogisticLoss(int d) : d_(d) {}
  std::string name() const override { return "logistic"; }
  int dim() const override { return d_; }
  double Value(std::span<const double> w, const RecordView& r) const override;
  void Gradient(std::span<const double> w, const RecordView& r,
                std::span<double> grad) const override;

 private:
  int d_;
};

}  // namespace pfl

#endif  // PFL_PROBLEMS_LOSSES_H_
