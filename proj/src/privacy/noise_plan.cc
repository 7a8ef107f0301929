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

#include "pfl/privacy/noise_plan.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "pfl/shuffle/shuffle.h"

namespace pfl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCertifyMargin = 1e-9;

struct AlgorithmEntry {
  Algorithm algorithm;
  const char* name;
};

constexpr AlgorithmEntry kAlgorithms[] = {
    {Algorithm::kIsrlProxSgd, "isrl_prox_sgd"},
    {Algorithm::kSdpProxSgd, "sdp_prox_sgd"},
    {Algorithm::kIsrlSvrg, "isrl_prox_svrg"},
    {Algorithm::kIsrlPlSvrg, "isrl_prox_pl_svrg"},
    {Algorithm::kSdpSvrg, "sdp_prox_svrg"},
    {Algorithm::kSdpPlSvrg, "sdp_prox_pl_svrg"},
    {Algorithm::kIsrlSpider, "isrl_spider"},
    {Algorithm::kSdpSpider, "sdp_spider"},
    {Algorithm::kIsrlSpiderAlt, "isrl_spider_alt"},
    {Algorithm::kMbSgd, "mb_sgd"},
    {Algorithm::kLocalSgd, "local_sgd"},
};

std::string Num(double v) { return absl::StrCat(v); }

absl::Status Violated(const std::string& inequality, const std::string& detail) {
  return absl::FailedPreconditionError(
      absl::StrCat("constraint ", inequality, " violated: ", detail));
}

bool IsSvrg(Algorithm a) {
  return a == Algorithm::kIsrlSvrg || a == Algorithm::kIsrlPlSvrg ||
         a == Algorithm::kSdpSvrg || a == Algorithm::kSdpPlSvrg;
}

absl::Status ResolveAvailability(const RunConfig& config, NoisePlan& plan) {
  const int N = plan.dims.num_silos;
  if (const auto* fixed = std::get_if<FixedAvailability>(&config.availability)) {
    const int m = fixed->m == 0 ? N : fixed->m;
    if (m < 1 || m > N) {
      return absl::InvalidArgumentError(
          absl::StrCat("available silos M=", m, " must lie in [1, N=", N, "]"));
    }
    plan.min_available = m;
    plan.mean_inverse_available = 1.0 / m;
    return absl::OkStatus();
  }
  const auto& random = std::get<RandomAvailability>(config.availability);
  if (random.m_values.empty()) {
    return absl::InvalidArgumentError("random availability needs M values");
  }
  int lo = N;
  double inv = 0.0;
  for (int m : random.m_values) {
    if (m < 1 || m > N) {
      return absl::InvalidArgumentError(
          absl::StrCat("available silos M=", m, " must lie in [1, N=", N, "]"));
    }
    lo = std::min(lo, m);
    inv += 1.0 / m;
  }
  plan.min_available = lo;
  plan.mean_inverse_available = inv / random.m_values.size();
  return absl::OkStatus();
}

absl::Status CheckBatch(const char* name, int k, int n) {
  if (k < 1) return Violated(absl::StrCat(name, " >= 1"), absl::StrCat(name, "=", k));
  if (k > n) {
    return Violated(absl::StrCat(name, " <= n"),
                    absl::StrCat(name, "=", k, ", n=", n));
  }
  return absl::OkStatus();
}

absl::StatusOr<P1DParams> ParamsFor(const RunConfig& config,
                                    const PrivacyBudget& budget,
                                    int64_t contributors, int d, double range) {
  if (config.shuffle_override.has_value()) {
    if (auto s = ValidateP1DParams(*config.shuffle_override); !s.ok()) return s;
    return *config.shuffle_override;
  }
  return ChooseParams(budget, contributors, d, range);
}

absl::Status AddShuffleCall(const RunConfig& config, NoisePlan& plan,
                            std::string name, PrivacyBudget budget,
                            double range, int64_t contributors,
                            double param_range) {
  auto params =
      ParamsFor(config, budget, contributors, plan.dims.dim, param_range);
  if (!params.ok()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "shuffle call '", name, "': ", params.status().message()));
  }
  plan.shuffle_calls.push_back(
      ShuffleCall{std::move(name), budget, range, contributors, *params});
  return absl::OkStatus();
}

absl::Status PlanProxSgd(const RunConfig& config, NoisePlan& plan) {
  const int n = plan.dims.records_per_silo;
  const bool priv = plan.mechanism != Mechanism::kNonPrivate;
  plan.rounds = config.rounds;
  if (plan.rounds < 1) return Violated("R >= 1", absl::StrCat("R=", plan.rounds));
  plan.batch_size = config.batch_size > 0 ? config.batch_size : n / plan.rounds;
  if (plan.batch_size < 1) {
    return Violated("K = floor(n/R) >= 1",
                    absl::StrCat("n=", n, ", R=", plan.rounds));
  }
  if (auto s = CheckBatch("K", plan.batch_size, n); !s.ok()) return s;
  if (priv && static_cast<int64_t>(plan.batch_size) * plan.rounds > n) {
    return Violated("K R <= n (disjoint batches)",
                    absl::StrCat("K=", plan.batch_size, ", R=", plan.rounds,
                                 ", n=", n));
  }
  plan.step_size = config.step_size.value_or(1.0 / (2.0 * plan.dims.smooth_beta));
  if (!priv) return absl::OkStatus();

  const double eps = plan.budget.epsilon;
  const double delta = plan.budget.delta;
  const double K = plan.batch_size;
  if (plan.algorithm == Algorithm::kIsrlProxSgd) {
    plan.published.sigma_sq =
        8.0 * plan.L * plan.L * std::log(1.0 / delta) / (eps * eps * K * K);
    plan.formulas.push_back(
        {"sigma_sq", "8 L^2 ln(1/delta) / (eps^2 K^2)"});
    plan.accounting = AccountingStyle::kZcdpParallel;
    return absl::OkStatus();
  }
  const int N = plan.dims.num_silos;
  const int M = plan.min_available;
  const double need = N * std::min(eps / 2.0, 1.0);
  if (M < need) {
    return Violated("M >= N min(eps/2, 1)",
                    absl::StrCat("M=", M, " < ", Num(need)));
  }
  plan.accounting = AccountingStyle::kParallelDp;
  plan.formulas.push_back({"round_budget", "((N / (2M)) eps, delta)"});
  return AddShuffleCall(config, plan, "round",
                        PrivacyBudget{N * eps / (2.0 * M), delta}, plan.L,
                        static_cast<int64_t>(M) * plan.batch_size, plan.L);
}

absl::Status PlanSvrg(const RunConfig& config, NoisePlan& plan) {
  const int n = plan.dims.records_per_silo;
  const bool priv = plan.mechanism != Mechanism::kNonPrivate;
  const bool pl = plan.algorithm == Algorithm::kIsrlPlSvrg ||
                  plan.algorithm == Algorithm::kSdpPlSvrg;
  const bool sdp = IsShuffleAlgorithm(plan.algorithm);
  plan.restarts = pl ? config.restarts : 1;
  plan.epochs = config.epochs;
  if (plan.restarts < 1) return Violated("S >= 1", absl::StrCat("S=", plan.restarts));
  if (plan.epochs < 1) return Violated("E >= 1", absl::StrCat("E=", plan.epochs));
  const double eps = plan.budget.epsilon;
  const double delta = plan.budget.delta;
  const double S = plan.restarts;
  const double E = plan.epochs;
  const double log2d = std::log(2.0 / delta);

  if (priv && !sdp) {
    const double cap = std::min(2.0 * log2d, 15.0);
    if (eps > cap) {
      return Violated("eps <= min(2 ln(2/delta), 15)",
                      absl::StrCat("eps=", Num(eps), ", bound=", Num(cap)));
    }
  }

  auto epoch_len = [&](int k) {
    return config.epoch_length > 0 ? config.epoch_length : n / k;
  };
  auto k_bound = [&](int k) {
    const double R = E * epoch_len(k);
    return eps * n / (4.0 * std::sqrt(2.0 * S * R * log2d));
  };

  if (config.batch_size > 0) {
    plan.batch_size = config.batch_size;
  } else if (priv && !sdp) {
    plan.batch_size = 0;
    for (int k = 1; k <= n; ++k) {
      if (epoch_len(k) >= 1 && k >= k_bound(k)) {
        plan.batch_size = k;
        break;
      }
    }
    if (plan.batch_size == 0) {
      return Violated("K >= eps n / (4 sqrt(2 S R ln(2/delta)))",
                      "no K in [1, n] satisfies it");
    }
  } else {
    plan.batch_size = std::max(1, static_cast<int>(std::ceil(std::sqrt(n))));
  }
  if (auto s = CheckBatch("K", plan.batch_size, n); !s.ok()) return s;
  plan.epoch_length = epoch_len(plan.batch_size);
  if (plan.epoch_length < 1) {
    return Violated("Q >= 1", absl::StrCat("Q=", plan.epoch_length));
  }
  const double K = plan.batch_size;
  const double Q = plan.epoch_length;
  const double R = E * Q;
  if (priv && !sdp && K < k_bound(plan.batch_size)) {
    return Violated("K >= eps n / (4 sqrt(2 S R ln(2/delta)))",
                    absl::StrCat("K=", plan.batch_size, " < ",
                                 Num(k_bound(plan.batch_size))));
  }
  const double M = plan.min_available;
  plan.step_size = config.step_size.value_or(
      std::min(1.0, std::pow(K, 1.5) * std::sqrt(M) / n) /
      (8.0 * plan.dims.smooth_beta));
  if (!priv) return absl::OkStatus();

  if (!sdp) {
    const double L2 = plan.L * plan.L;
    const double nn = static_cast<double>(n) * n;
    plan.published.sigma1_sq = 256.0 * L2 * S * E * log2d *
                           std::log(5.0 * E / delta) / (eps * eps * nn);
    plan.published.sigma2_sq = 1024.0 * L2 * S * R * log2d *
                           std::log(2.5 * R / delta) / (eps * eps * nn);
    plan.formulas.push_back(
        {"sigma1_sq", "256 L^2 S E ln(2/delta) ln(5E/delta) / (eps^2 n^2)"});
    plan.formulas.push_back(
        {"sigma2_sq", "1024 L^2 S R ln(2/delta) ln(2.5R/delta) / (eps^2 n^2), R = E Q"});
    plan.accounting = AccountingStyle::kAdvancedComposition;
    return absl::OkStatus();
  }

  PrivacyBudget per_restart{eps, delta};
  if (pl) {
    per_restart = {eps / (2.0 * std::sqrt(2.0 * S)), delta / (2.0 * S)};
  }
  const int N = plan.dims.num_silos;
  const double eps_call =
      per_restart.epsilon * N * n /
      (8.0 * M * K * std::sqrt(4.0 * R * std::log(2.0 / per_restart.delta)));
  const PrivacyBudget call{eps_call, per_restart.delta / (2.0 * R)};
  plan.formulas.push_back(
      {"call_budget", "eps~ = eps N n / (8 M K sqrt(4 E Q ln(2/delta))), delta~ = delta / (2 E Q)"});
  if (pl) plan.formulas.push_back({"restart_budget", "(eps / (2 sqrt(2S)), delta / (2S))"});
  plan.accounting = AccountingStyle::kAdvancedComposition;
  const int64_t mi = plan.min_available;
  if (auto s = AddShuffleCall(config, plan, "anchor", call, plan.L, mi * n, plan.L);
      !s.ok()) {
    return s;
  }
  return AddShuffleCall(config, plan, "diff", call, 2.0 * plan.L,
                        mi * plan.batch_size, 2.0 * plan.L);
}

absl::Status SpiderAutoConfig(const RunConfig& config, NoisePlan& plan) {
  if (!config.gap_estimate.has_value() || !(*config.gap_estimate > 0.0)) {
    return absl::InvalidArgumentError(
        "spider_auto needs a positive gap_estimate (F(w0) - F*)");
  }
  const double gap = *config.gap_estimate;
  const double eps = plan.budget.epsilon;
  const double n = plan.dims.records_per_silo;
  const double M = plan.min_available;
  const double d = plan.dims.dim;
  const double beta = plan.dims.smooth_beta;
  const double L = plan.L;
  const double ln = std::log(1.0 / plan.budget.delta);
  const bool partial = plan.min_available < plan.dims.num_silos;
  double q = std::pow(eps * n * L * std::sqrt(M) / std::sqrt(d * ln * gap * beta),
                      2.0 / 3.0);
  if (partial) q = std::min(q, n * M);
  q = std::floor(q);
  plan.formulas.push_back(
      {"auto_q", "floor(min((eps n L sqrt(M) / sqrt(d ln(1/delta) gap beta))^(2/3), n M / 1{M<N}))"});
  plan.formulas.push_back(
      {"auto_R", "ceil(eps n sqrt(M q) sqrt(gap beta) / (L sqrt(d ln(1/delta))))"});
  if (q < 1.0) {
    plan.return_initial_point = true;
    plan.phase_length = 1;
    plan.rounds = 0;
    return absl::OkStatus();
  }
  q = std::min(q, 1e6);
  double R = std::ceil(eps * n * std::sqrt(M * q) * std::sqrt(gap * beta) /
                       (L * std::sqrt(d * ln)));
  R = std::clamp(R, 1.0, 1e6);
  plan.phase_length = static_cast<int>(q);
  plan.rounds = static_cast<int>(R);
  return absl::OkStatus();
}

absl::Status PlanSpider(const RunConfig& config, NoisePlan& plan) {
  const int n = plan.dims.records_per_silo;
  const bool priv = plan.mechanism != Mechanism::kNonPrivate;
  const bool sdp = plan.algorithm == Algorithm::kSdpSpider;
  const bool mb = plan.algorithm == Algorithm::kMbSgd;
  if (mb) {
    plan.batch_refresh = config.batch_size > 0 ? config.batch_size : n;
    plan.batch_diff = plan.batch_refresh;
  } else {
    plan.batch_refresh = config.batch_size_refresh > 0 ? config.batch_size_refresh : n;
    plan.batch_diff = config.batch_size_diff > 0 ? config.batch_size_diff : n;
  }
  if (auto s = CheckBatch("K1", plan.batch_refresh, n); !s.ok()) return s;
  if (auto s = CheckBatch("K2", plan.batch_diff, n); !s.ok()) return s;
  plan.batch_size = plan.batch_refresh;
  plan.slope_noise = config.spider_slope_noise;
  plan.step_size = config.step_size.value_or(1.0 / (2.0 * plan.dims.smooth_beta));
  if (config.spider_auto && !mb && priv) {
    if (auto s = SpiderAutoConfig(config, plan); !s.ok()) return s;
    if (plan.return_initial_point) return absl::OkStatus();
  } else {
    plan.rounds = config.rounds;
    plan.phase_length = mb ? 1 : config.phase_length;
  }
  if (plan.rounds < 1) return Violated("R >= 1", absl::StrCat("R=", plan.rounds));
  if (plan.phase_length < 1) {
    return Violated("q >= 1", absl::StrCat("q=", plan.phase_length));
  }
  if (!priv) return absl::OkStatus();

  const double eps = plan.budget.epsilon;
  const double delta = plan.budget.delta;
  const double ln = std::log(1.0 / delta);
  const double R = plan.rounds;
  const double q = plan.phase_length;
  const double K1 = plan.batch_refresh;
  const double K2 = plan.batch_diff;
  const double L2 = plan.L * plan.L;
  const double beta = plan.dims.smooth_beta;
  if (!sdp) {
    plan.published.sigma1_sq =
        16.0 * L2 * ln * std::max(R / q, 1.0) / (eps * eps * K1 * K1);
    plan.published.sigma2_sq =
        plan.slope_noise ? 16.0 * beta * beta * R * ln / (eps * eps * K2 * K2)
                         : kInf;
    plan.published.sigma2_cap_sq = 64.0 * L2 * R * ln / (eps * eps * K2 * K2);
    if (mb) {
      plan.published.sigma_sq = plan.published.sigma1_sq;
      plan.formulas.push_back({"sigma_sq", "16 L^2 R ln(1/delta) / (eps^2 K^2)"});
    } else {
      plan.formulas.push_back(
          {"sigma1_sq", "16 L^2 ln(1/delta) max(R/q, 1) / (eps^2 K1^2)"});
      plan.formulas.push_back(
          {"sigma2_sq", plan.slope_noise
                            ? "16 beta^2 R ln(1/delta) / (eps^2 K2^2)"
                            : "inf (slope term disabled)"});
      plan.formulas.push_back(
          {"sigma2_cap_sq", "64 L^2 R ln(1/delta) / (eps^2 K2^2)"});
    }
    plan.accounting = AccountingStyle::kZcdp;
    return absl::OkStatus();
  }
  const double N = plan.dims.num_silos;
  const double M = plan.min_available;
  const double nn = n;
  const PrivacyBudget refresh{
      eps * nn * N /
          (4.0 * K1 * M * std::sqrt(2.0 * ln) *
           std::max(1.0, std::sqrt(q) / std::sqrt(R))),
      delta * q / (2.0 * R)};
  const PrivacyBudget diff{
      eps * N * nn / (4.0 * M * K2 * std::sqrt(2.0 * R * ln)),
      delta / (2.0 * R)};
  plan.formulas.push_back(
      {"refresh_budget", "(eps n N / (4 K1 M sqrt(2 ln(1/delta)) max(1, sqrt(q/R))), delta q / (2R))"});
  plan.formulas.push_back(
      {"diff_budget", "(eps N n / (4 M K2 sqrt(2 R ln(1/delta))), delta / (2R))"});
  plan.accounting = AccountingStyle::kAdvancedComposition;
  const int64_t mi = plan.min_available;
  if (auto s = AddShuffleCall(config, plan, "refresh", refresh, plan.L,
                              mi * plan.batch_refresh, plan.L);
      !s.ok()) {
    return s;
  }
  // Params are fixed for the worst-case range 2L; each round rescales the
  // encoding to its own range.
  return AddShuffleCall(config, plan, "diff", diff, 0.0,
                        mi * plan.batch_diff, 2.0 * plan.L);
}

absl::Status PlanSpiderAlt(const RunConfig& config, NoisePlan& plan) {
  const int n = plan.dims.records_per_silo;
  const bool priv = plan.mechanism != Mechanism::kNonPrivate;
  plan.rounds = config.rounds;
  if (plan.rounds < 1) return Violated("R >= 1", absl::StrCat("R=", plan.rounds));
  const double eps = plan.budget.epsilon;
  const double R = plan.rounds;
  int k_default = n;
  if (priv) {
    k_default = static_cast<int>(
        std::floor(n * std::sqrt(eps) / (2.0 * std::sqrt(R))));
    k_default = std::clamp(k_default, 1, n);
  }
  plan.batch_refresh = config.batch_size_refresh > 0 ? config.batch_size_refresh : k_default;
  plan.batch_diff = config.batch_size_diff > 0 ? config.batch_size_diff : k_default;
  if (auto s = CheckBatch("K1", plan.batch_refresh, n); !s.ok()) return s;
  if (auto s = CheckBatch("K2", plan.batch_diff, n); !s.ok()) return s;
  plan.batch_size = plan.batch_refresh;
  plan.step_size = config.step_size.value_or(1.0 / (2.0 * plan.dims.smooth_beta));
  if (!priv) return absl::OkStatus();
  const double l2d = std::log(2.0 / plan.budget.delta);
  const double L2 = plan.L * plan.L;
  const double nn = static_cast<double>(n) * n;
  plan.published.sigma1_sq = 32.0 * L2 * l2d * R / (nn * eps * eps);
  plan.published.sigma2_sq = 8.0 * L2 * l2d * R / (nn * eps * eps);
  plan.formulas.push_back({"sigma1_sq", "32 L^2 ln(2/delta) R / (n^2 eps^2)"});
  plan.formulas.push_back({"sigma2_sq", "8 L^2 ln(2/delta) R / (n^2 eps^2)"});
  plan.formulas.push_back({"K1 = K2", "n sqrt(eps) / (2 sqrt(R))"});
  plan.accounting = AccountingStyle::kZcdp;
  return absl::OkStatus();
}

absl::Status PlanLocalSgd(const RunConfig& config, NoisePlan& plan) {
  const int n = plan.dims.records_per_silo;
  plan.rounds = config.rounds;
  plan.local_steps = config.local_steps;
  if (plan.rounds < 1) return Violated("R >= 1", absl::StrCat("R=", plan.rounds));
  if (plan.local_steps < 1) {
    return Violated("T >= 1", absl::StrCat("T=", plan.local_steps));
  }
  plan.batch_size = config.batch_size > 0 ? config.batch_size : n;
  if (auto s = CheckBatch("K", plan.batch_size, n); !s.ok()) return s;
  plan.step_size = config.step_size.value_or(1.0 / (2.0 * plan.dims.smooth_beta));
  if (plan.mechanism == Mechanism::kNonPrivate) return absl::OkStatus();
  const double eps = plan.budget.epsilon;
  const double K = plan.batch_size;
  plan.published.sigma_sq = 16.0 * plan.L * plan.L * plan.rounds *
                        plan.local_steps * std::log(1.0 / plan.budget.delta) /
                        (eps * eps * K * K);
  plan.formulas.push_back({"sigma_sq", "16 L^2 R T ln(1/delta) / (eps^2 K^2)"});
  plan.accounting = AccountingStyle::kZcdp;
  return absl::OkStatus();
}

// Accountant fed with the worst-case charges of the whole schedule.
PrivacyAccountant Project(NoisePlan plan, const GaussianVariances& v) {
  plan.effective = v;
  PrivacyAccountant acc(plan);
  auto rho = [&](double r, int64_t times) {
    for (int64_t i = 0; i < times; ++i) acc.ChargeRho(r).IgnoreError();
  };
  switch (plan.algorithm) {
    case Algorithm::kIsrlProxSgd:
      rho(ProxSgdRoundRho(plan), 1);
      break;
    case Algorithm::kIsrlSvrg:
    case Algorithm::kIsrlPlSvrg: {
      const int64_t se = static_cast<int64_t>(plan.restarts) * plan.epochs;
      const double a = SvrgAnchorEpsilon(plan);
      const double b = SvrgInnerEpsilon(plan);
      for (int64_t i = 0; i < se; ++i) acc.ChargeEpsilon(kGroupFirst, a).IgnoreError();
      for (int64_t i = 0; i < se * plan.epoch_length; ++i) {
        acc.ChargeEpsilon(kGroupSecond, b).IgnoreError();
      }
      break;
    }
    case Algorithm::kIsrlSpider:
    case Algorithm::kMbSgd: {
      const int64_t refreshes =
          (plan.rounds + plan.phase_length - 1) / plan.phase_length;
      const double K2 = plan.batch_diff;
      double diff = 8.0 * plan.L * plan.L / (K2 * K2 * v.sigma2_cap_sq);
      if (std::isfinite(v.sigma2_sq)) {
        diff = std::max(diff, 2.0 * plan.dims.smooth_beta *
                                  plan.dims.smooth_beta / (K2 * K2 * v.sigma2_sq));
      }
      rho(SpiderRefreshRho(plan), refreshes);
      rho(diff, plan.rounds - refreshes);
      break;
    }
    case Algorithm::kIsrlSpiderAlt:
      rho(AltSpiderGradRho(plan), plan.rounds + 1);
      rho(AltSpiderDiffRho(plan), plan.rounds);
      break;
    case Algorithm::kLocalSgd:
      rho(LocalSgdStepRho(plan),
          static_cast<int64_t>(plan.rounds) * plan.local_steps);
      break;
    default:
      break;
  }
  return acc;
}

double ProjectedEpsilon(const NoisePlan& plan, const GaussianVariances& v) {
  return Project(plan, v).EpsilonSpent();
}

GaussianVariances Scaled(const GaussianVariances& v, double c) {
  return GaussianVariances{v.sigma_sq * c, v.sigma1_sq * c, v.sigma2_sq * c,
                           v.sigma2_cap_sq * c};
}

void Calibrate(NoisePlan& plan) {
  const double eps = plan.budget.epsilon;
  plan.projected_epsilon_published = ProjectedEpsilon(plan, plan.published);
  double c = 1.0;
  if (plan.calibration == NoiseCalibration::kCertified &&
      plan.projected_epsilon_published > eps) {
    if (plan.accounting == AccountingStyle::kZcdp ||
        plan.accounting == AccountingStyle::kZcdpParallel) {
      // Every charge scales as 1/c, so the closed-form inverse is exact.
      const double projected_rho = Project(plan, plan.published).ledger().total();
      c = projected_rho * (1.0 + kCertifyMargin) /
          MaxRhoFor(eps, plan.budget.delta);
      c = std::max(c, 1.0);
      for (int i = 0; i < 64 && ProjectedEpsilon(plan, Scaled(plan.published, c)) > eps; ++i) {
        c *= 1.0 + kCertifyMargin;
      }
    } else {
      double lo = 1.0;
      double hi = 2.0;
      while (ProjectedEpsilon(plan, Scaled(plan.published, hi)) > eps && hi < 1e300) {
        lo = hi;
        hi *= 2.0;
      }
      for (int i = 0; i < 200 && hi - lo > kCertifyMargin * lo; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ProjectedEpsilon(plan, Scaled(plan.published, mid)) > eps) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      c = hi;
    }
  }
  plan.calibration_factor = c;
  plan.effective = c == 1.0 ? plan.published : Scaled(plan.published, c);
  PrivacyAccountant acc = Project(plan, plan.effective);
  plan.projected_epsilon = acc.EpsilonSpent();
  plan.projected_delta = acc.DeltaSpent();
}

void ProjectShuffle(NoisePlan& plan) {
  PrivacyAccountant acc(plan);
  const double N = plan.dims.num_silos;
  const double M = plan.min_available;
  const double n = plan.dims.records_per_silo;
  auto silo_rate = M < N ? M / N : 1.0;
  switch (plan.algorithm) {
    case Algorithm::kSdpProxSgd:
      acc.ChargeEpsilon(0, AmplifiedEpsilon(plan.shuffle_calls[0].budget.epsilon,
                                            silo_rate))
          .IgnoreError();
      break;
    case Algorithm::kSdpSvrg:
    case Algorithm::kSdpPlSvrg: {
      const int64_t se = static_cast<int64_t>(plan.restarts) * plan.epochs;
      const double a = plan.shuffle_calls[0].budget.epsilon;
      const double b =
          AmplifiedEpsilon(plan.shuffle_calls[1].budget.epsilon, plan.batch_size / n);
      for (int64_t i = 0; i < se; ++i) acc.ChargeEpsilon(kGroupFirst, a).IgnoreError();
      for (int64_t i = 0; i < se * plan.epoch_length; ++i) {
        acc.ChargeEpsilon(kGroupSecond, b).IgnoreError();
      }
      break;
    }
    case Algorithm::kSdpSpider: {
      const int64_t refreshes =
          (plan.rounds + plan.phase_length - 1) / plan.phase_length;
      for (int64_t i = 0; i < refreshes; ++i) {
        acc.ChargeEpsilon(kGroupFirst, plan.shuffle_calls[0].budget.epsilon)
            .IgnoreError();
      }
      for (int64_t i = refreshes; i < plan.rounds; ++i) {
        acc.ChargeEpsilon(kGroupSecond, plan.shuffle_calls[1].budget.epsilon)
            .IgnoreError();
      }
      break;
    }
    default:
      break;
  }
  plan.projected_epsilon = acc.EpsilonSpent();
  plan.projected_epsilon_published = plan.projected_epsilon;
  plan.projected_delta = acc.DeltaSpent();
}

}  // namespace

absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name) {
  for (const auto& e : kAlgorithms) {
    if (name == e.name) return e.algorithm;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown algorithm '", name, "'"));
}

std::string AlgorithmName(Algorithm a) {
  for (const auto& e : kAlgorithms) {
    if (e.algorithm == a) return e.name;
  }
  return "unknown";
}

const std::vector<Algorithm>& AllAlgorithms() {
  static const auto* all = [] {
    auto* v = new std::vector<Algorithm>;
    for (const auto& e : kAlgorithms) v->push_back(e.algorithm);
    return v;
  }();
  return *all;
}

bool IsShuffleAlgorithm(Algorithm a) {
  return a == Algorithm::kSdpProxSgd || a == Algorithm::kSdpSvrg ||
         a == Algorithm::kSdpPlSvrg || a == Algorithm::kSdpSpider;
}

std::string AccountingStyleName(AccountingStyle s) {
  switch (s) {
    case AccountingStyle::kNone:
      return "none";
    case AccountingStyle::kZcdp:
      return "zcdp";
    case AccountingStyle::kZcdpParallel:
      return "zcdp_parallel";
    case AccountingStyle::kAdvancedComposition:
      return "advanced_composition";
    case AccountingStyle::kParallelDp:
      return "parallel_dp";
  }
  return "none";
}

double MaxRhoFor(double eps, double delta) {
  const double l = std::log(1.0 / delta);
  const double r = std::sqrt(l + eps) - std::sqrt(l);
  return r * r;
}

double GaussianStepEpsilon(double sensitivity, double sigma_sq,
                           double delta_step) {
  if (sensitivity == 0.0) return 0.0;
  if (!(sigma_sq > 0.0)) return kInf;
  const double rho = GaussianRho(sensitivity, sigma_sq);
  double best = rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta_step));
  const double classic = ClassicGaussianEpsilon(sensitivity, sigma_sq, delta_step);
  if (classic < 1.0) best = std::min(best, classic);
  return best;
}

double AmplifiedEpsilon(double eps, double rate) {
  if (eps <= 1.0 && rate < 1.0) return std::min(eps, 2.0 * rate * eps);
  return eps;
}

double ProxSgdRoundRho(const NoisePlan& plan) {
  return GaussianRho(2.0 * plan.L / plan.batch_size, plan.effective.sigma_sq);
}

double LocalSgdStepRho(const NoisePlan& plan) {
  return GaussianRho(2.0 * plan.L / plan.batch_size, plan.effective.sigma_sq);
}

double SvrgAnchorEpsilon(const NoisePlan& plan) {
  const double se = static_cast<double>(plan.restarts) * plan.epochs;
  return GaussianStepEpsilon(2.0 * plan.L / plan.dims.records_per_silo,
                             plan.effective.sigma1_sq,
                             plan.budget.delta / (4.0 * se));
}

double SvrgInnerEpsilon(const NoisePlan& plan) {
  const double seq =
      static_cast<double>(plan.restarts) * plan.epochs * plan.epoch_length;
  const double step = GaussianStepEpsilon(4.0 * plan.L / plan.batch_size,
                                          plan.effective.sigma2_sq,
                                          plan.budget.delta / (4.0 * seq));
  return AmplifiedEpsilon(
      step, static_cast<double>(plan.batch_size) / plan.dims.records_per_silo);
}

double SpiderRefreshRho(const NoisePlan& plan) {
  return GaussianRho(2.0 * plan.L / plan.batch_refresh, plan.effective.sigma1_sq);
}

double SpiderDiffVariance(const NoisePlan& plan, double step_norm) {
  const double cap = plan.effective.sigma2_cap_sq;
  if (!std::isfinite(plan.effective.sigma2_sq)) return cap;
  return std::min(plan.effective.sigma2_sq * step_norm * step_norm, cap);
}

double SpiderDiffSensitivity(const NoisePlan& plan, double step_norm) {
  return std::min(2.0 * plan.dims.smooth_beta * step_norm, 4.0 * plan.L) /
         plan.batch_diff;
}

double SpiderDiffRho(const NoisePlan& plan, double step_norm) {
  return GaussianRho(SpiderDiffSensitivity(plan, step_norm),
                     SpiderDiffVariance(plan, step_norm));
}

double AltSpiderDiffRho(const NoisePlan& plan) {
  return GaussianRho(4.0 * plan.L / plan.batch_refresh, plan.effective.sigma1_sq);
}

double AltSpiderGradRho(const NoisePlan& plan) {
  return GaussianRho(2.0 * plan.L / plan.batch_diff, plan.effective.sigma2_sq);
}

PrivacyAccountant::PrivacyAccountant(const NoisePlan& plan)
    : style_(plan.accounting), delta_(plan.budget.delta) {
  if (style_ != AccountingStyle::kAdvancedComposition) return;
  const double delta = plan.budget.delta;
  if (IsSvrg(plan.algorithm)) {
    const double se = static_cast<double>(plan.restarts) * plan.epochs;
    const double seq = se * plan.epoch_length;
    if (IsShuffleAlgorithm(plan.algorithm)) {
      const double d = plan.shuffle_calls.empty()
                           ? delta / (4.0 * seq)
                           : plan.shuffle_calls[0].budget.delta;
      groups_ = {Group{d, delta / 4.0}, Group{d, delta / 4.0}};
    } else {
      groups_ = {Group{delta / (4.0 * se), delta / 4.0},
                 Group{delta / (4.0 * seq), delta / 4.0}};
    }
  } else {
    const double d1 = plan.shuffle_calls.size() > 0 ? plan.shuffle_calls[0].budget.delta
                                                    : delta;
    const double d2 = plan.shuffle_calls.size() > 1 ? plan.shuffle_calls[1].budget.delta
                                                    : delta;
    groups_ = {Group{d1, delta / 4.0}, Group{d2, delta / 4.0}};
  }
}

absl::Status PrivacyAccountant::ChargeRho(double rho) {
  if (style_ != AccountingStyle::kZcdp && style_ != AccountingStyle::kZcdpParallel) {
    return absl::FailedPreconditionError("accountant does not track rho");
  }
  if (auto s = ledger_.Charge(rho); !s.ok()) return s;
  rho_max_ = std::max(rho_max_, rho);
  return absl::OkStatus();
}

absl::Status PrivacyAccountant::ChargeEpsilon(int group, double eps) {
  if (!(eps >= 0.0)) return absl::InvalidArgumentError("eps must be >= 0");
  if (style_ == AccountingStyle::kParallelDp) {
    eps_max_ = std::max(eps_max_, eps);
    return absl::OkStatus();
  }
  if (style_ != AccountingStyle::kAdvancedComposition || group < 0 ||
      group >= static_cast<int>(groups_.size())) {
    return absl::FailedPreconditionError("accountant does not track this group");
  }
  Group& g = groups_[group];
  ++g.count;
  g.eps_max = std::max(g.eps_max, eps);
  return absl::OkStatus();
}

double PrivacyAccountant::EpsilonSpent() const {
  switch (style_) {
    case AccountingStyle::kNone:
      return kInf;
    case AccountingStyle::kZcdp:
      return ledger_.total() +
             2.0 * std::sqrt(ledger_.total() * std::log(1.0 / delta_));
    case AccountingStyle::kZcdpParallel:
      return rho_max_ + 2.0 * std::sqrt(rho_max_ * std::log(1.0 / delta_));
    case AccountingStyle::kParallelDp:
      return eps_max_;
    case AccountingStyle::kAdvancedComposition: {
      double total = 0.0;
      for (const Group& g : groups_) {
        if (g.count == 0) continue;
        auto r = AdvancedComposition(g.eps_max, g.delta_step, g.count, g.delta_prime);
        total += r.ok() ? r->epsilon : kInf;
      }
      return total;
    }
  }
  return kInf;
}

double PrivacyAccountant::DeltaSpent() const {
  switch (style_) {
    case AccountingStyle::kNone:
      return 0.0;
    case AccountingStyle::kZcdp:
    case AccountingStyle::kZcdpParallel:
    case AccountingStyle::kParallelDp:
      return delta_;
    case AccountingStyle::kAdvancedComposition: {
      double total = 0.0;
      for (const Group& g : groups_) {
        if (g.count > 0) total += g.count * g.delta_step + g.delta_prime;
      }
      return total;
    }
  }
  return 0.0;
}

absl::StatusOr<NoisePlan> PlanNoise(Algorithm algorithm,
                                    const RunConfig& config,
                                    const ProblemDims& dims) {
  if (dims.num_silos < 1 || dims.records_per_silo < 1 || dims.dim < 1) {
    return absl::InvalidArgumentError("problem dims must be positive");
  }
  if (!(dims.lipschitz_L > 0.0) || !(dims.smooth_beta > 0.0)) {
    return absl::InvalidArgumentError("L and beta must be positive");
  }
  if (!(config.clip_threshold >= 0.0)) {
    return absl::InvalidArgumentError("clip_threshold must be >= 0");
  }
  if (config.step_size.has_value() && !(*config.step_size > 0.0)) {
    return absl::InvalidArgumentError("step_size must be positive");
  }
  NoisePlan plan;
  plan.algorithm = algorithm;
  plan.mechanism = config.mechanism;
  plan.calibration = config.calibration;
  plan.budget = config.privacy;
  plan.dims = dims;
  plan.L = config.clip_threshold > 0.0
               ? std::min(config.clip_threshold, dims.lipschitz_L)
               : dims.lipschitz_L;
  const bool priv = config.mechanism != Mechanism::kNonPrivate;
  if (priv) {
    const bool sdp = IsShuffleAlgorithm(algorithm);
    if (sdp && config.mechanism != Mechanism::kShuffleBinomial) {
      return absl::InvalidArgumentError(absl::StrCat(
          AlgorithmName(algorithm), " needs mechanism shuffle_binomial"));
    }
    if (!sdp && config.mechanism != Mechanism::kIsrlGaussian) {
      return absl::InvalidArgumentError(absl::StrCat(
          AlgorithmName(algorithm), " needs mechanism isrl_gaussian"));
    }
    if (auto s = ValidateBudget(config.privacy); !s.ok()) return s;
  }
  if (auto s = ResolveAvailability(config, plan); !s.ok()) return s;

  absl::Status status;
  switch (algorithm) {
    case Algorithm::kIsrlProxSgd:
    case Algorithm::kSdpProxSgd:
      status = PlanProxSgd(config, plan);
      break;
    case Algorithm::kIsrlSvrg:
    case Algorithm::kIsrlPlSvrg:
    case Algorithm::kSdpSvrg:
    case Algorithm::kSdpPlSvrg:
      status = PlanSvrg(config, plan);
      break;
    case Algorithm::kIsrlSpider:
    case Algorithm::kSdpSpider:
    case Algorithm::kMbSgd:
      status = PlanSpider(config, plan);
      break;
    case Algorithm::kIsrlSpiderAlt:
      status = PlanSpiderAlt(config, plan);
      break;
    case Algorithm::kLocalSgd:
      status = PlanLocalSgd(config, plan);
      break;
  }
  if (!status.ok()) return status;

  if (!priv) {
    plan.accounting = AccountingStyle::kNone;
    plan.projected_epsilon = kInf;
    plan.projected_epsilon_published = kInf;
    return plan;
  }
  if (plan.return_initial_point) {
    plan.accounting = AccountingStyle::kZcdp;
    plan.projected_epsilon = 0.0;
    plan.projected_epsilon_published = 0.0;
    return plan;
  }
  if (IsShuffleAlgorithm(algorithm)) {
    ProjectShuffle(plan);
  } else {
    Calibrate(plan);
  }
  plan.constraints.push_back(absl::StrCat(
      "projected eps ", Num(plan.projected_epsilon), " (published constants ",
      Num(plan.projected_epsilon_published), ") vs budget ", Num(plan.budget.epsilon)));
  return plan;
}

}  // namespace pfl
