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

#include "pfl/shuffle/shuffle.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "pfl/kernels/kernels.h"

namespace pfl {
namespace {

constexpr int64_t kMaxGranularity = int64_t{1} << 16;
constexpr double kMaxTrials = 4.0e18;

// x in [0, range], already checked.
int64_t EncodeOnes(double x, double range, const P1DParams& params,
                   RandomStream& rng) {
  const double t = x / range * static_cast<double>(params.g);
  double floor_t = std::floor(t);
  double frac = t - floor_t;
  if (floor_t >= static_cast<double>(params.g)) {
    floor_t = static_cast<double>(params.g);
    frac = 0.0;
  }
  int64_t ones = static_cast<int64_t>(floor_t);
  if (rng.Bernoulli(frac)) ++ones;
  ones += rng.Binomial(params.b, params.p);
  return ones;
}

double Decode(double count_sum, const P1DParams& params, int64_t n,
              double range) {
  const double centered =
      count_sum - params.p * static_cast<double>(params.b) * static_cast<double>(n);
  return range / static_cast<double>(params.g) * centered;
}

}  // namespace

absl::Status ValidateP1DParams(const P1DParams& params) {
  if (params.g < 1) return absl::InvalidArgumentError("g must be >= 1");
  if (params.b < 0) return absl::InvalidArgumentError("b must be >= 0");
  if (!(params.p > 0.0 && params.p < 0.5)) {
    return absl::InvalidArgumentError("p must lie in (0, 1/2)");
  }
  return absl::OkStatus();
}

absl::StatusOr<ScalarMessage> RandomizeScalar(double x, double L,
                                              const P1DParams& params,
                                              RandomStream& rng) {
  if (auto s = ValidateP1DParams(params); !s.ok()) return s;
  if (!(L > 0.0)) return absl::InvalidArgumentError("L must be > 0");
  if (!(x >= 0.0 && x <= L)) {
    return absl::InvalidArgumentError(
        absl::StrCat("x=", x, " outside [0, L] with L=", L));
  }
  return ScalarMessage{EncodeOnes(x, L, params, rng)};
}

absl::StatusOr<double> AnalyzeScalar(std::span<const ScalarMessage> messages,
                                     const P1DParams& params,
                                     int64_t n_contributors, double L) {
  if (auto s = ValidateP1DParams(params); !s.ok()) return s;
  int64_t total = 0;
  for (const ScalarMessage& m : messages) {
    if (m.ones_count < 0 || m.ones_count > params.g + params.b) {
      return absl::InvalidArgumentError("message ones_count out of range");
    }
    total += m.ones_count;
  }
  return Decode(static_cast<double>(total), params, n_contributors, L);
}

absl::StatusOr<std::vector<LabeledMessage>> RandomizeVector(
    std::span<const double> x, double L, const P1DParams& params,
    RandomStream& rng) {
  if (auto s = ValidateP1DParams(params); !s.ok()) return s;
  if (!(L > 0.0)) return absl::InvalidArgumentError("L must be > 0");
  if (auto s = ValidateFinite(x, "shuffle input"); !s.ok()) return s;
  const double norm = std::sqrt(kernels::SquaredNorm(x));
  if (norm > L * (1.0 + 1e-12)) {
    return absl::InvalidArgumentError(
        absl::StrCat("input norm ", norm, " exceeds L=", L));
  }
  std::vector<LabeledMessage> out;
  out.reserve(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    const double shifted = std::clamp(x[j] + L, 0.0, 2.0 * L);
    out.push_back({static_cast<int32_t>(j),
                   ScalarMessage{EncodeOnes(shifted, 2.0 * L, params, rng)}});
  }
  return out;
}

absl::StatusOr<std::vector<double>> AnalyzeVector(
    std::span<const LabeledMessage> messages, int d, const P1DParams& params,
    int64_t n_contributors, double L) {
  if (auto s = ValidateP1DParams(params); !s.ok()) return s;
  if (d < 1) return absl::InvalidArgumentError("d must be >= 1");
  std::vector<int64_t> totals(d, 0), counts(d, 0);
  for (const LabeledMessage& m : messages) {
    if (m.coord < 0 || m.coord >= d) {
      return absl::InvalidArgumentError("message labeled with unknown coordinate");
    }
    if (m.message.ones_count < 0 ||
        m.message.ones_count > params.g + params.b) {
      return absl::InvalidArgumentError("message ones_count out of range");
    }
    totals[m.coord] += m.message.ones_count;
    ++counts[m.coord];
  }
  for (int j = 0; j < d; ++j) {
    if (counts[j] != n_contributors) {
      return absl::InvalidArgumentError(absl::StrCat(
          "coordinate ", j, " has ", counts[j], " messages, expected ",
          n_contributors));
    }
  }
  std::vector<double> out(d);
  for (int j = 0; j < d; ++j) {
    out[j] = Decode(static_cast<double>(totals[j]), params, n_contributors,
                    2.0 * L) -
             static_cast<double>(n_contributors) * L;
  }
  return out;
}

absl::StatusOr<P1DParams> ChooseParams(const PrivacyBudget& budget,
                                       int64_t n_contributors, int d,
                                       double L) {
  if (!(budget.epsilon > 0.0 && budget.epsilon <= 15.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "shuffle protocol needs 0 < eps <= 15, got eps=", budget.epsilon));
  }
  if (!(budget.delta > 0.0 && budget.delta < 0.5)) {
    return absl::InvalidArgumentError("shuffle protocol needs 0 < delta < 1/2");
  }
  if (n_contributors < 1 || d < 1 || !(L > 0.0)) {
    return absl::InvalidArgumentError("need N >= 1, d >= 1, L > 0");
  }
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n_contributors);
  const double eps0 =
      budget.epsilon / (2.0 * std::sqrt(2.0 * dd * std::log(2.0 / budget.delta)));
  const double delta0 = budget.delta / (2.0 * dd);
  const double g_raw = std::ceil(std::sqrt(nn)) * std::ceil(1.0 / eps0);
  const double g = std::min(g_raw, static_cast<double>(kMaxGranularity));
  const double b = std::ceil(64.0 * g * g * std::log(4.0 / delta0) /
                             (eps0 * eps0 * nn));
  if (!(b < kMaxTrials)) {
    return absl::InvalidArgumentError(
        absl::StrCat("binomial trial count b=", b, " overflows"));
  }
  P1DParams out;
  out.g = static_cast<int64_t>(g);
  out.b = static_cast<int64_t>(b);
  out.p = 0.25;
  return out;
}

double EstimatorVarianceBound(const P1DParams& params, int64_t n_contributors,
                              double L) {
  const double unit = 2.0 * L / static_cast<double>(params.g);
  return unit * unit * static_cast<double>(n_contributors) *
         (0.25 + static_cast<double>(params.b) * params.p * (1.0 - params.p));
}

VectorSumProtocol::VectorSumProtocol(int d, double L, const P1DParams& params)
    : d_(d), L_(L), params_(params), counts_(d, 0) {}

void VectorSumProtocol::Add(std::span<const double> x, RandomStream& rng) {
  for (int j = 0; j < d_; ++j) {
    const double shifted = std::clamp(x[j] + L_, 0.0, 2.0 * L_);
    counts_[j] += EncodeOnes(shifted, 2.0 * L_, params_, rng);
  }
  ++contributors_;
}

std::vector<double> VectorSumProtocol::Estimate() const {
  std::vector<double> out(d_);
  for (int j = 0; j < d_; ++j) {
    out[j] = Decode(static_cast<double>(counts_[j]), params_, contributors_,
                    2.0 * L_) -
             static_cast<double>(contributors_) * L_;
  }
  return out;
}

}  // namespace pfl
