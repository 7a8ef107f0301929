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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "oracles.h"
#include "pfl/core/random.h"
#include "pfl/harness/adjacency.h"
#include "pfl/harness/config.h"
#include "pfl/harness/experiment.h"
#include "pfl/harness/results_csv.h"
#include "pfl/optimizers/messages.h"
#include "pfl/optimizers/optimizers.h"
#include "pfl/privacy/noise_plan.h"
#include "pfl/privacy/privacy.h"
#include "pfl/problems/losses.h"
#include "pfl/problems/problems.h"
#include "pfl/prox/prox.h"
#include "pfl/shuffle/shuffle.h"

namespace pfl {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

RandomStream TestStream(uint64_t seed, uint64_t round, uint64_t silo = 0,
                        Purpose purpose = Purpose::kData) {
  return DeriveStream(seed, {AlgorithmTag::kTest, round, silo, purpose, 0});
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// 1. Prox operators against the numeric argmin, and non-expansiveness.
Outcome ProxCriterion() {
  Outcome out;
  double worst = 0.0;
  int failures = 0;
  for (uint64_t t = 0; t < 500; ++t) {
    RandomStream rng = TestStream(101, t);
    const int d = 1 + static_cast<int>(rng.UniformInt(10));
    const double eta = 0.05 + 2.0 * rng.Uniform01();
    const double lambda = 0.05 + rng.Uniform01();
    const double radius = 0.2 + 2.0 * rng.Uniform01();
    std::vector<double> z(d);
    rng.FillGaussian(z, 0.5 + 2.0 * rng.Uniform01());
    for (const RegularizerSpec& f1 :
         {RegularizerSpec{L1Reg{lambda}}, RegularizerSpec{BallReg{radius}},
          RegularizerSpec{L1BallReg{lambda, radius}}}) {
      auto got = Prox(f1, eta, z);
      if (!got.ok()) {
        ++failures;
        continue;
      }
      const double err = oracles::Distance(*got, oracles::ProxArgmin(f1, eta, z));
      worst = std::max(worst, err);
      if (err > 1e-6) ++failures;
    }
  }
  out.Require(failures == 0, absl::StrCat(failures, " prox outputs off the oracle"));
  double worst_ratio = 0.0;
  for (uint64_t t = 0; t < 1000; ++t) {
    RandomStream rng = TestStream(102, t);
    const int d = 1 + static_cast<int>(rng.UniformInt(10));
    std::vector<double> a(d), b(d);
    rng.FillGaussian(a, 2.0);
    rng.FillGaussian(b, 2.0);
    for (const RegularizerSpec& f1 :
         {RegularizerSpec{L1Reg{0.4}}, RegularizerSpec{BallReg{1.0}},
          RegularizerSpec{L1BallReg{0.4, 1.0}}}) {
      const double num = oracles::Distance(*Prox(f1, 0.8, a), *Prox(f1, 0.8, b));
      worst_ratio = std::max(worst_ratio, num / oracles::Distance(a, b));
    }
  }
  out.Require(worst_ratio <= 1.0 + 1e-12, "expansion detected");
  out.detail = absl::StrFormat("max oracle gap %.2e, max Lipschitz ratio %.12f%s%s",
                               worst, worst_ratio, out.detail.empty() ? "" : "; ",
                               out.detail);
  return out;
}

// 2. Noiseless full-batch Prox-SGD contracts at rate 1 - mu/(2 beta).
Outcome ContractionCriterion() {
  Outcome out;
  auto p = MakeQuadratic({.num_silos = 5, .records_per_silo = 50, .dim = 10,
                          .mu = 0.1, .beta = 1.0, .seed = 2024});
  if (!p.ok() || !p->known.has_value()) {
    out.Require(false, "generator failed");
    return out;
  }
  const auto& quad = static_cast<const QuadraticLoss&>(*p->loss.f0);
  const std::vector<double>& A = quad.matrix();
  const int d = 10;
  const ModelPoint& wstar = p->known->minimizer;
  // F(w) - F* = 0.5 (w - w*)' A (w - w*) for this family.
  auto excess = [&](const ModelPoint& w) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) s += (w[i] - wstar[i]) * A[i * d + j] * (w[j] - wstar[j]);
    }
    return 0.5 * s;
  };
  const double mu = p->known->mu, beta = p->known->beta;
  const double rate = 1.0 - mu / (2.0 * beta);
  RunConfig c;
  c.mechanism = Mechanism::kNonPrivate;
  c.batch_size = 50;
  std::vector<double> ex(201);
  ex[0] = excess(ModelPoint(d, 0.0));
  double worst_ratio = 0.0, worst_row_gap = 0.0;
  for (int r = 1; r <= 200; ++r) {
    c.rounds = r;
    auto run = RunIsrlProxSgd(*p, c);
    if (!run.ok()) {
      out.Require(false, std::string(run.status().message()));
      return out;
    }
    ex[r] = excess(run->final_model);
    worst_ratio = std::max(worst_ratio, ex[r] / ex[r - 1]);
    worst_row_gap = std::max(worst_row_gap, std::abs(*run->rows.back().excess_risk - ex[r]));
  }
  out.Require(worst_ratio <= rate + 1e-9,
              absl::StrFormat("ratio %.6f above %.6f", worst_ratio, rate));
  out.Require(ex[200] < 1e-8, absl::StrFormat("final excess %.3e", ex[200]));
  out.Require(worst_row_gap < 1e-10, "recorded excess disagrees with the quadratic form");
  out.detail = absl::StrFormat(
      "kappa=%.1f max ratio %.6f <= %.6f, final excess %.3e%s%s", beta / mu,
      worst_ratio, rate, ex[200], out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// 3. Shuffle protocol: unbiased, variance within the bound, stable constant.
Outcome ShuffleCriterion() {
  Outcome out;
  struct Setting {
    double eps;
    int d;
    int N;
  };
  const std::vector<Setting> settings = {{0.5, 1, 20},  {1.0, 10, 20}, {5.0, 1, 200},
                                         {0.5, 10, 200}, {1.0, 1, 200}, {5.0, 10, 20}};
  const double L = 1.0, delta = 1e-5;
  const int trials = 10000, seeds = 5;
  double worst_var = 0.0, worst_pooled = 0.0;
  std::string summary;
  for (const Setting& s : settings) {
    auto params = ChooseParams({s.eps, delta}, s.N, s.d, L);
    if (!params.ok()) {
      out.Require(false, std::string(params.status().message()));
      continue;
    }
    std::vector<std::vector<double>> inputs(s.N, std::vector<double>(s.d));
    std::vector<double> truth(s.d, 0.0);
    for (int i = 0; i < s.N; ++i) {
      for (int j = 0; j < s.d; ++j) {
        inputs[i][j] = 0.9 * L * std::sin(1.0 + i + 3.0 * j) / std::sqrt(s.d);
        truth[j] += inputs[i][j];
      }
    }
    const double bound = EstimatorVarianceBound(*params, s.N, L);
    const double scale = s.d * L * L * std::pow(std::log(s.d / delta), 2) / (s.eps * s.eps);
    std::vector<double> constants;
    double pooled = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      std::vector<double> sum(s.d, 0.0), sum_sq(s.d, 0.0);
      for (int t = 0; t < trials; ++t) {
        VectorSumProtocol proto(s.d, L, *params);
        for (int i = 0; i < s.N; ++i) {
          RandomStream rng = TestStream(300 + seed, t, i, Purpose::kShuffle);
          proto.Add(inputs[i], rng);
        }
        const std::vector<double> est = proto.Estimate();
        for (int j = 0; j < s.d; ++j) {
          const double e = est[j] - truth[j];
          sum[j] += e;
          sum_sq[j] += e * e;
        }
      }
      double total_var = 0.0;
      for (int j = 0; j < s.d; ++j) {
        const double mean = sum[j] / trials;
        const double var = (sum_sq[j] - trials * mean * mean) / (trials - 1);
        total_var += var;
        out.Require(std::abs(mean) <= 4.0 * std::sqrt(var / trials),
                    absl::StrFormat("bias eps=%g d=%d N=%d coord %d", s.eps, s.d, s.N, j));
        worst_var = std::max(worst_var, var / bound);
        pooled += var / bound;
        // The bound is nearly tight, so allow the sampling error of a variance
        // estimate: sd ~ var sqrt(2/(T-1)).
        out.Require(var <= bound * (1.0 + 4.0 * std::sqrt(2.0 / (trials - 1))),
                    absl::StrFormat("variance %.4g > bound %.4g", var, bound));
      }
      constants.push_back(total_var / scale);
    }
    // Same check on the average over all coordinates and seeds.
    const int samples = seeds * s.d;
    pooled /= samples;
    worst_pooled = std::max(worst_pooled, pooled);
    out.Require(pooled <= 1.0 + 4.0 * std::sqrt(2.0 / ((trials - 1.0) * samples)),
                absl::StrFormat("pooled variance / bound %.4f eps=%g d=%d N=%d", pooled, s.eps,
                                s.d, s.N));
    const double mean_c = std::accumulate(constants.begin(), constants.end(), 0.0) / seeds;
    for (double c : constants) {
      out.Require(std::abs(c / mean_c - 1.0) <= 0.2,
                  absl::StrFormat("C unstable eps=%g d=%d N=%d", s.eps, s.d, s.N));
    }
    const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
    absl::StrAppendFormat(&summary, "%s(eps=%g,d=%d,N=%d) C=%.3g [%.3g,%.3g]",
                          summary.empty() ? "" : " ", s.eps, s.d, s.N, mean_c, *lo, *hi);
  }
  out.detail = absl::StrFormat("variance / bound max %.3f, pooled max %.4f; ", worst_var,
                                worst_pooled) + summary +
               (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// 4. Empirical sensitivities, and the attainable worst case for a gradient batch.
Outcome SensitivityCriterion() {
  Outcome out;
  auto p = MakeQuadratic({.num_silos = 5, .records_per_silo = 60, .dim = 8, .seed = 4});
  if (!p.ok()) {
    out.Require(false, "generator failed");
    return out;
  }
  int checks = 0;
  for (Algorithm a : AllAlgorithms()) {
    RunConfig c;
    c.mechanism = IsShuffleAlgorithm(a) ? Mechanism::kShuffleBinomial : Mechanism::kIsrlGaussian;
    c.privacy = {4.0, 1.0 / (60.0 * 60.0)};
    c.rounds = 5;
    c.batch_size = 12;
    c.batch_size_refresh = 30;
    c.batch_size_diff = 15;
    auto res = ProbeAdjacency(*p, a, c, 100, 77);
    if (!res.ok()) {
      out.Require(false, absl::StrCat(AlgorithmName(a), ": ", res.status().message()));
      continue;
    }
    for (const AdjacencyCheck& ch : *res) {
      ++checks;
      out.Require(ch.ok, absl::StrFormat("%s/%s observed %.4g > declared %.4g",
                                         ch.algorithm, ch.message, ch.max_observed,
                                         ch.declared));
    }
  }
  // Worst case: records w - s u and w + s u give clipped gradients L u and -L u.
  const int K = 10, n = 60;
  const double L = p->loss.lipschitz_L;
  const int d = p->dim();
  RandomStream rng = TestStream(404, 0);
  ModelPoint w(d);
  rng.FillGaussian(w, 0.3);
  std::vector<double> u(d);
  rng.FillGaussian(u, 1.0);
  const double un = oracles::Norm(u);
  for (double& x : u) x /= un;
  const double s = 1e3 * (1.0 + L);
  std::vector<double> x1(d), x2(d);
  for (int k = 0; k < d; ++k) {
    x1[k] = w[k] - s * u[k];
    x2[k] = w[k] + s * u[k];
  }
  const FederatedDataset D1 = p->dataset.WithRecord(0, 3, x1, 0.0);
  const FederatedDataset D2 = p->dataset.WithRecord(0, 3, x2, 0.0);
  RandomStream brng = TestStream(405, 0);
  std::vector<int> idx = SampleDistinct(n, K, brng);
  if (!std::binary_search(idx.begin(), idx.end(), 3)) {
    idx[0] = 3;
    std::sort(idx.begin(), idx.end());
  }
  std::vector<double> m1(d), m2(d);
  MeanClippedGradient(*p->loss.f0, D1, 0, idx, w, L, m1);
  MeanClippedGradient(*p->loss.f0, D2, 0, idx, w, L, m2);
  const double achieved = oracles::Distance(m1, m2);
  const double declared = *UpdateSensitivity(SgdBatch{K}, L);
  out.Require(achieved >= 0.99 * declared && achieved <= declared * (1 + 1e-9),
              absl::StrFormat("worst case %.6g vs 2L/K %.6g", achieved, declared));
  out.detail = absl::StrFormat("%d message checks x 100 swaps; worst case %.6f of 2L/K%s%s",
                               checks, achieved / declared,
                               out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// 5. SPIDER estimation error against the martingale bound, averaged over runs.
Outcome SpiderCriterion() {
  Outcome out;
  auto p = MakeQuadratic({.num_silos = 5, .records_per_silo = 50, .dim = 10,
                          .mu = 0.1, .beta = 1.0, .seed = 55});
  if (!p.ok()) {
    out.Require(false, "generator failed");
    return out;
  }
  const int R = 30, runs = 200;
  RunConfig c;
  c.rounds = R;
  c.phase_length = 5;
  c.privacy = {2.0, 1.0 / (50.0 * 50.0)};
  c.diagnostics = true;
  std::vector<double> err(R, 0.0), rhs(R, 0.0);
  for (int s = 0; s < runs; ++s) {
    c.seed = 1000 + s;
    auto run = RunIsrlSpider(*p, c);
    if (!run.ok() || !run->spider.has_value()) {
      out.Require(false, "run failed");
      return out;
    }
    const SpiderDiagnostics& dg = *run->spider;
    for (int r = 0; r < R; ++r) {
      double path = 0.0;
      for (int t = static_cast<int>(dg.phase_start[r]) + 1; t <= r; ++t) {
        path += dg.step_norm_sq[t];
      }
      err[r] += dg.estimate_error_sq[r] / runs;
      rhs[r] += (dg.tau2_sq * path + dg.tau1_sq) / runs;
    }
  }
  double worst = 0.0;
  for (int r = 0; r < R; ++r) worst = std::max(worst, err[r] / rhs[r]);
  out.Require(worst <= 1.2, absl::StrFormat("error/bound reaches %.4f", worst));
  out.detail = absl::StrFormat("%d runs, %d rounds, max mean-error / bound = %.4f%s%s",
                               runs, R, worst, out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// 6. Variance of the mean of a uniformly sampled subset of vectors.
Outcome SamplingVarianceCriterion() {
  Outcome out;
  auto formula = [](const std::vector<std::vector<double>>& a, int m) {
    const double nn = static_cast<double>(a.size());
    double sq = 0.0;
    for (const auto& v : a) sq += std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    return (nn - m) / ((nn - 1.0) * m) * sq / nn;
  };
  auto centered = [](int count, int d, uint64_t seed) {
    std::vector<std::vector<double>> a(count, std::vector<double>(d));
    std::vector<double> mean(d, 0.0);
    RandomStream rng = TestStream(seed, 0);
    for (auto& v : a) {
      rng.FillGaussian(v, 1.0);
      for (int j = 0; j < d; ++j) mean[j] += v[j] / count;
    }
    for (auto& v : a) {
      for (int j = 0; j < d; ++j) v[j] -= mean[j];
    }
    return a;
  };
  const auto small = centered(4, 3, 601);
  const double exact = oracles::SubsetMeanSecondMoment(small, 2);
  const double want = formula(small, 2);
  const double rel = std::abs(exact - want) / want;
  out.Require(rel <= 1e-14, absl::StrFormat("enumeration off by %.2e", rel));

  // Monte Carlo with the library's availability sampler.
  const int N = 25, M = 12, T = 40000;
  const auto big = centered(N, 4, 602);
  auto sampler = AvailabilitySampler::Create(N, FixedAvailability{M}, 603, AlgorithmTag::kTest);
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < T; ++t) {
    std::vector<double> mean(4, 0.0);
    for (int i : sampler->Draw(t)) {
      for (int j = 0; j < 4; ++j) mean[j] += big[i][j] / M;
    }
    const double v = std::inner_product(mean.begin(), mean.end(), mean.begin(), 0.0);
    sum += v;
    sum_sq += v * v;
  }
  const double mc = sum / T;
  const double se = std::sqrt((sum_sq / T - mc * mc) / (T - 1));
  const double target = formula(big, M);
  out.Require(std::abs(mc - target) <= 3.0 * se,
              absl::StrFormat("Monte Carlo %.6g vs %.6g (SE %.2g)", mc, target, se));
  out.detail = absl::StrFormat(
      "N=4,M=2 enumeration rel. gap %.1e; N=25,M=12 MC %.6g vs %.6g (%.2f SE)%s%s", rel,
      mc, target, std::abs(mc - target) / se, out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// |got - want| within half a unit in the last printed digit of want.
bool MatchesPrinted(double got, double printed, int sig_digits) {
  const double unit = std::pow(10.0, std::floor(std::log10(std::abs(printed))) - sig_digits + 1);
  return std::abs(got - printed) <= 0.5 * unit;
}

bool SixDigits(double got, double want) {
  return std::abs(got - want) <= 5e-7 * std::abs(want);
}

// 7. Worked accountant values, and every ISRL run stays within its budget.
Outcome AccountantCriterion() {
  Outcome out;
  // Independent evaluations of the closed forms.
  const double ln100 = std::log(100.0);
  const double g = *GaussianSigmaSq(0.2, {1.0, 0.01});
  out.Require(SixDigits(g, 4.0 * 0.2 * 0.2 * ln100), "gaussian_sigma_sq");
  const double z = *ZcdpToDp(0.125, std::exp(-1.0));
  out.Require(SixDigits(z, 0.125 + 2.0 * std::sqrt(0.125)) && MatchesPrinted(z, 0.83211, 5),
              "zcdp_to_dp");
  const double ac = AdvancedComposition(0.1, 1e-7, 100, 1e-6)->epsilon;
  out.Require(SixDigits(ac, std::sqrt(200.0 * std::log(1e6)) * 0.1 + 10.0 * std::expm1(0.1)) &&
                  MatchesPrinted(ac, 6.3082, 5),
              "advanced_composition");
  RunConfig pc;
  pc.privacy = {1.0, 0.01};
  pc.rounds = 1;
  pc.batch_size = 20;
  auto plan = PlanNoise(Algorithm::kIsrlProxSgd, pc,
                        {.num_silos = 4, .records_per_silo = 100, .dim = 5,
                         .lipschitz_L = 1.0, .smooth_beta = 1.0});
  const double sg = plan.ok() ? plan->published.sigma_sq : NAN;
  out.Require(SixDigits(sg, 8.0 * ln100 / 400.0) && MatchesPrinted(sg, 0.092103, 5),
              "plan_noise");
  const double ud = IsrlToUserLevel(0.5, 1e-5, 2)->delta;
  out.Require(SixDigits(ud, 2.0 * std::exp(0.5) * 1e-5) && MatchesPrinted(ud, 3.2974e-5, 5),
              "isrl_to_user_level");

  auto p = MakeLogistic({.num_silos = 6, .records_per_silo = 300, .dim = 8, .seed = 70});
  double max_ratio = 0.0;
  int runs = 0;
  for (Algorithm a : {Algorithm::kIsrlProxSgd, Algorithm::kIsrlSvrg, Algorithm::kIsrlPlSvrg,
                      Algorithm::kIsrlSpider, Algorithm::kIsrlSpiderAlt, Algorithm::kMbSgd,
                      Algorithm::kLocalSgd}) {
    for (double eps : {0.5, 2.0, 8.0}) {
      for (int m : {6, 3}) {
        RunConfig c;
        c.privacy = {eps, 1.0 / (300.0 * 300.0)};
        c.rounds = 8;
        c.epochs = 2;
        c.restarts = 2;
        c.phase_length = 3;
        c.batch_size = a == Algorithm::kIsrlProxSgd ? 30 : 0;
        c.batch_size_refresh = 100;
        c.batch_size_diff = 50;
        c.local_steps = 2;
        c.availability = FixedAvailability{m};
        c.seed = 5 + runs;
        auto run = RunAlgorithm(a, *p, c);
        if (!run.ok()) {
          out.Require(false, absl::StrCat(AlgorithmName(a), ": ", run.status().message()));
          continue;
        }
        ++runs;
        const double spent = run->rows.back().epsilon_spent;
        max_ratio = std::max(max_ratio, spent / eps);
        out.Require(spent <= eps * (1 + 1e-12),
                    absl::StrFormat("%s eps=%g spent %.6g", AlgorithmName(a), eps, spent));
      }
    }
  }
  out.detail = absl::StrFormat(
      "sigma_sq %.6f, zcdp %.6f, adv.comp %.6f, plan %.7f, user delta %.6e; %d ISRL runs, "
      "max spent/eps %.6f%s%s",
      g, z, ac, sg, ud, runs, max_ratio, out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// 8. Privacy-utility trend on the heterogeneous logistic problem.
Outcome TrendCriterion() {
  Outcome out;
  auto p = MakeLogistic({.num_silos = 10, .records_per_silo = 500, .dim = 20,
                         .label_by_silo = true, .seed = 8});
  if (!p.ok()) {
    out.Require(false, "generator failed");
    return out;
  }
  const std::vector<double> grid = {0.75, 1.5, 3.0, 4.5, 6.0, 12.0, 18.0};
  const std::vector<int> phase_lengths = {1, 2, 3, 4};
  const int seeds = 10;
  auto median_norm = [&](Algorithm a, double eps, int q, uint64_t seed0) {
    std::vector<double> v;
    for (int s = 0; s < seeds; ++s) {
      RunConfig c;
      c.privacy = {eps, 1.0 / (500.0 * 500.0)};
      c.rounds = 50;
      c.phase_length = q;
      c.seed = seed0 + s;
      auto run = RunAlgorithm(a, *p, c);
      if (!run.ok()) return std::nan("");
      v.push_back(run->rows.back().grad_mapping_norm_sq);
    }
    return Median(v);
  };
  std::vector<double> spider, mb;
  std::string qs;
  for (double eps : grid) {
    // q is tuned on held-out seeds, then evaluated on fresh ones.
    int best_q = 1;
    double best = INFINITY;
    for (int q : phase_lengths) {
      const double v = median_norm(Algorithm::kIsrlSpider, eps, q, 500);
      if (v < best) {
        best = v;
        best_q = q;
      }
    }
    spider.push_back(median_norm(Algorithm::kIsrlSpider, eps, best_q, 0));
    mb.push_back(median_norm(Algorithm::kMbSgd, eps, 1, 0));
    absl::StrAppend(&qs, qs.empty() ? "" : ",", best_q);
  }
  std::string table;
  for (size_t k = 0; k < grid.size(); ++k) {
    absl::StrAppendFormat(&table, "%s%g:%.3g/%.3g", k ? " " : "", grid[k], spider[k], mb[k]);
    out.Require(!std::isnan(spider[k]) && !std::isnan(mb[k]), "run failed");
    if (k > 0) {
      out.Require(spider[k] <= spider[k - 1],
                  absl::StrFormat("SPIDER not monotone at eps=%g", grid[k]));
    }
    out.Require(spider[k] <= mb[k], absl::StrFormat("SPIDER above MB-SGD at eps=%g", grid[k]));
  }
  out.detail = absl::StrFormat("median |G|^2 SPIDER/MB-SGD by eps: %s; tuned q: %s%s%s", table,
                               qs, out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// 9. Reruns of every cell give byte-identical CSV blocks.
Outcome DeterminismCriterion() {
  Outcome out;
  auto spec = ParseExperimentSpec(R"({
    "schema_version": 1,
    "problem": {"generator": "logistic", "num_silos": 6, "records_per_silo": 120,
                "dim": 5, "seed": 9},
    "algorithms": ["isrl_prox_sgd", "sdp_prox_sgd", "isrl_prox_svrg", "sdp_prox_svrg",
                   "isrl_prox_pl_svrg", "sdp_prox_pl_svrg", "isrl_spider", "sdp_spider",
                   "isrl_spider_alt", "mb_sgd", "local_sgd"],
    "epsilons": [1.0],
    "seeds": [3, 4],
    "run": {"rounds": 4, "epochs": 2, "restarts": 2, "phase_length": 2, "batch_size": 20,
            "batch_size_refresh": 60, "batch_size_diff": 30,
            "availability": {"mode": "random", "m_values": [4, 5, 6]}}
  })");
  if (!spec.ok()) {
    out.Require(false, std::string(spec.status().message()));
    return out;
  }
  auto first = RunExperiment(*spec, 1);
  auto second = RunExperiment(*spec, 3);
  if (!first.ok() || !second.ok()) {
    out.Require(false, "experiment failed");
    return out;
  }
  int cells = 0, feasible = 0;
  for (size_t k = 0; k < first->cells.size(); ++k) {
    ExperimentResult a{first->problem, {first->cells[k]}};
    ExperimentResult b{second->problem, {second->cells[k]}};
    const std::string block_a = FormatResultsCsv(ResultRows(a));
    out.Require(block_a == FormatResultsCsv(ResultRows(b)),
                absl::StrCat("cell ", AlgorithmName(first->cells[k].algorithm), " differs"));
    ++cells;
    if (first->cells[k].status.ok()) ++feasible;
  }
  out.Require(feasible == cells, "some cells infeasible");
  out.detail = absl::StrFormat("%d cells (%d feasible) identical across reruns%s%s", cells,
                               feasible, out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

}  // namespace
}  // namespace pfl

int main() {
  struct Criterion {
    const char* name;
    std::function<pfl::Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria = {
      {"prox correctness", pfl::ProxCriterion, 10},
      {"contraction", pfl::ContractionCriterion, 5},
      {"shuffle protocol", pfl::ShuffleCriterion, 60},
      {"sensitivity", pfl::SensitivityCriterion, 30},
      {"spider martingale bound", pfl::SpiderCriterion, 120},
      {"sampling variance", pfl::SamplingVarianceCriterion, 60},
      {"accountant exactness", pfl::AccountantCriterion, 60},
      {"privacy-utility trend", pfl::TrendCriterion, 600},
      {"determinism", pfl::DeterminismCriterion, 60},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const auto start = pfl::Clock::now();
    pfl::Outcome o = criteria[k].run();
    const double secs =
        std::chrono::duration<double>(pfl::Clock::now() - start).count();
    if (secs > criteria[k].budget_s) {
      o.Require(false, absl::StrFormat("took %.1fs > %.0fs", secs, criteria[k].budget_s));
    }
    std::printf("%s %zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
