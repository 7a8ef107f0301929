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

#ifndef PFL_CORE_TYPES_H_
#define PFL_CORE_TYPES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"

namespace pfl {

// A point w in R^d.
using ModelPoint = std::vector<double>;

absl::Status ValidateFinite(std::span<const double> v, const char* what);

struct ZeroReg {};
struct L1Reg {
  double lambda = 0.0;
};
struct BallReg {
  double radius = 1.0;
};
struct L1BallReg {
  double lambda = 0.0;
  double radius = 1.0;
};
using RegularizerSpec = std::variant<ZeroReg, L1Reg, BallReg, L1BallReg>;

absl::Status ValidateRegularizer(const RegularizerSpec& f1);
// f1(w); +infinity outside the ball for the indicator variants.
double RegularizerValue(const RegularizerSpec& f1, std::span<const double> w);
std::string RegularizerName(const RegularizerSpec& f1);

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;
};

absl::Status ValidateBudget(const PrivacyBudget& budget);

// Encoding parameters of the scalar shuffle randomizer.
struct P1DParams {
  int64_t g = 1;
  int64_t b = 0;
  double p = 0.25;
};

enum class Mechanism { kIsrlGaussian, kShuffleBinomial, kNonPrivate };

// kPublished uses the published variance formulas as-is. kCertified scales them
// by the smallest factor for which the run's accountant meets the budget.
enum class NoiseCalibration { kCertified, kPublished };

struct FixedAvailability {
  int m = 0;  // 0 means every silo
};
struct RandomAvailability {
  std::vector<int> m_values;  // M_r uniform over this set
};
using Availability = std::variant<FixedAvailability, RandomAvailability>;

struct RunConfig {
  int rounds = 1;                   // R
  int epochs = 1;                   // E
  int epoch_length = 0;             // Q, 0 derives floor(n/K)
  int restarts = 1;                 // S
  int batch_size = 0;               // K, 0 picks the algorithm default
  int batch_size_refresh = 0;       // K1, 0 means n
  int batch_size_diff = 0;          // K2, 0 means n
  int phase_length = 1;             // q
  std::optional<double> step_size;  // eta, unset picks the algorithm default
  int local_steps = 1;
  Availability availability = FixedAvailability{};
  double clip_threshold = 0.0;  // 0 uses the loss constant
  uint64_t seed = 0;
  PrivacyBudget privacy;
  Mechanism mechanism = Mechanism::kIsrlGaussian;
  NoiseCalibration calibration = NoiseCalibration::kCertified;
  bool spider_slope_noise = true;
  bool spider_auto = false;
  std::optional<double> gap_estimate;  // user estimate of F(w0) - F*
  bool diagnostics = false;
  bool record_wall_time = false;  // wall_ms stays 0 otherwise
  std::optional<P1DParams> shuffle_override;
  ModelPoint w0;  // empty means zeros
};

std::string MechanismName(Mechanism m);

struct RoundRecord {
  int64_t round = 0;
  double train_risk = 0.0;
  std::optional<double> excess_risk;
  double grad_mapping_norm_sq = 0.0;
  double epsilon_spent = 0.0;
  double wall_ms = 0.0;
};

struct SpiderDiagnostics {
  std::vector<double> estimate_error_sq;  // ||h_r - grad F(w_r)||^2
  std::vector<int64_t> phase_start;       // s_r
  std::vector<double> step_norm_sq;       // ||w_r - w_{r-1}||^2, 0 at r = 0
  double tau1_sq = 0.0;
  double tau2_sq = 0.0;
};

struct RunResult {
  std::vector<RoundRecord> rows;
  ModelPoint final_model;
  ModelPoint w_priv;
  int64_t w_priv_index = 0;
  double delta_spent = 0.0;
  std::string accounting;  // "zcdp", "advanced_composition", "shuffle", "none"
  std::optional<SpiderDiagnostics> spider;
};

}  // namespace pfl

#endif  // PFL_CORE_TYPES_H_
