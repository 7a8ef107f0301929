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

#ifndef PFL_PRIVACY_NOISE_PLAN_H_
#define PFL_PRIVACY_NOISE_PLAN_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pfl/core/types.h"
#include "pfl/privacy/privacy.h"

namespace pfl {

enum class Algorithm {
  kIsrlProxSgd,
  kSdpProxSgd,
  kIsrlSvrg,
  kIsrlPlSvrg,
  kSdpSvrg,
  kSdpPlSvrg,
  kIsrlSpider,
  kSdpSpider,
  kIsrlSpiderAlt,
  kMbSgd,
  kLocalSgd,
};

absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name);
std::string AlgorithmName(Algorithm a);
const std::vector<Algorithm>& AllAlgorithms();
bool IsShuffleAlgorithm(Algorithm a);

struct ProblemDims {
  int num_silos = 1;
  int records_per_silo = 1;
  int dim = 1;
  double lipschitz_L = 1.0;
  double smooth_beta = 1.0;
};

// Per-coordinate Gaussian variances. Unused entries stay 0; a disabled
// SPIDER slope term is +inf.
struct GaussianVariances {
  double sigma_sq = 0.0;       // Prox-SGD, MB-SGD, Local SGD
  double sigma1_sq = 0.0;      // SVRG anchor, SPIDER refresh, alt diff
  double sigma2_sq = 0.0;      // SVRG inner, SPIDER slope, alt gradient
  double sigma2_cap_sq = 0.0;  // SPIDER cap
};

// One use of the vector summation protocol inside an SDP round.
struct ShuffleCall {
  std::string name;
  PrivacyBudget budget;
  double range = 0.0;  // 0 means data dependent (SPIDER diff)
  int64_t contributors = 0;
  P1DParams params;
};

enum class AccountingStyle {
  kNone,
  kZcdp,                 // sequential composition of rho
  kZcdpParallel,         // disjoint batches: max rho per record
  kAdvancedComposition,  // per-group advanced composition, summed
  kParallelDp,           // disjoint batches, (eps, delta) per round
};

std::string AccountingStyleName(AccountingStyle s);

struct NoisePlan {
  Algorithm algorithm = Algorithm::kIsrlProxSgd;
  Mechanism mechanism = Mechanism::kIsrlGaussian;
  NoiseCalibration calibration = NoiseCalibration::kCertified;
  PrivacyBudget budget;
  ProblemDims dims;
  double L = 1.0;  // clip threshold used by every message

  int rounds = 0;
  int epochs = 0;
  int epoch_length = 0;
  int restarts = 1;
  int batch_size = 0;
  int batch_refresh = 0;
  int batch_diff = 0;
  int phase_length = 1;
  int local_steps = 1;
  int min_available = 0;
  double mean_inverse_available = 0.0;  // E[1/M_r]
  double step_size = 0.0;
  bool slope_noise = true;
  bool return_initial_point = false;

  GaussianVariances published;
  GaussianVariances effective;
  double calibration_factor = 1.0;

  AccountingStyle accounting = AccountingStyle::kNone;
  double projected_epsilon = 0.0;        // with effective variances
  double projected_epsilon_published = 0.0;  // with published variances
  double projected_delta = 0.0;

  std::vector<ShuffleCall> shuffle_calls;
  std::vector<std::pair<std::string, std::string>> formulas;
  std::vector<std::string> constraints;
};

absl::StatusOr<NoisePlan> PlanNoise(Algorithm algorithm,
                                    const RunConfig& config,
                                    const ProblemDims& dims);

// Per-step epsilon of a Gaussian release: best of the classic bound (when
// below 1) and the zCDP conversion.
double GaussianStepEpsilon(double sensitivity, double sigma_sq,
                           double delta_step);

// 2 * rate * eps when eps <= 1 and that is smaller, else eps.
double AmplifiedEpsilon(double eps, double rate);

// Charges for each message type. Sensitivities use the plan's L.
double ProxSgdRoundRho(const NoisePlan& plan);
double LocalSgdStepRho(const NoisePlan& plan);
double SvrgAnchorEpsilon(const NoisePlan& plan);
double SvrgInnerEpsilon(const NoisePlan& plan);
double SpiderRefreshRho(const NoisePlan& plan);
double SpiderDiffVariance(const NoisePlan& plan, double step_norm);
double SpiderDiffSensitivity(const NoisePlan& plan, double step_norm);
double SpiderDiffRho(const NoisePlan& plan, double step_norm);
double AltSpiderDiffRho(const NoisePlan& plan);
double AltSpiderGradRho(const NoisePlan& plan);

// Composition group ids used by the advanced-composition accountant.
inline constexpr int kGroupFirst = 0;   // SVRG anchor, SPIDER refresh
inline constexpr int kGroupSecond = 1;  // SVRG inner, SPIDER diff

class PrivacyAccountant {
 public:
  PrivacyAccountant() = default;
  explicit PrivacyAccountant(const NoisePlan& plan);

  absl::Status ChargeRho(double rho);
  absl::Status ChargeEpsilon(int group, double eps);

  double EpsilonSpent() const;
  double DeltaSpent() const;
  AccountingStyle style() const { return style_; }
  const ZcdpLedger& ledger() const { return ledger_; }

 private:
  struct Group {
    double delta_step = 0.0;
    double delta_prime = 0.0;
    int64_t count = 0;
    double eps_max = 0.0;
  };
  AccountingStyle style_ = AccountingStyle::kNone;
  double delta_ = 0.0;
  ZcdpLedger ledger_;
  double rho_max_ = 0.0;
  double eps_max_ = 0.0;
  std::vector<Group> groups_;
};

// Largest rho whose zCDP conversion stays within eps at delta.
double MaxRhoFor(double eps, double delta);

}  // namespace pfl

#endif  // PFL_PRIVACY_NOISE_PLAN_H_
