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

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "pfl/optimizers/optimizers.h"
#include "pfl/prox/prox.h"
#include "pfl/kernels/kernels.h"
#include "pfl/shuffle/shuffle.h"
#include "run_state.h"

namespace pfl {

ProblemDims DimsOf(const ProblemInstance& problem) {
  ProblemDims dims;
  dims.num_silos = problem.dataset.num_silos();
  dims.records_per_silo = problem.dataset.records_per_silo();
  dims.dim = problem.dim();
  dims.lipschitz_L = problem.loss.lipschitz_L;
  dims.smooth_beta = problem.loss.smooth_beta;
  return dims;
}

AlgorithmTag TagFor(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kIsrlProxSgd:
      return AlgorithmTag::kIsrlProxSgd;
    case Algorithm::kSdpProxSgd:
      return AlgorithmTag::kSdpProxSgd;
    case Algorithm::kIsrlSvrg:
    case Algorithm::kIsrlPlSvrg:
      return AlgorithmTag::kIsrlSvrg;
    case Algorithm::kSdpSvrg:
    case Algorithm::kSdpPlSvrg:
      return AlgorithmTag::kSdpSvrg;
    case Algorithm::kIsrlSpider:
    case Algorithm::kMbSgd:  // same streams, so MB-SGD is SPIDER with q = 1
      return AlgorithmTag::kIsrlSpider;
    case Algorithm::kSdpSpider:
      return AlgorithmTag::kSdpSpider;
    case Algorithm::kIsrlSpiderAlt:
      return AlgorithmTag::kIsrlSpiderAlt;
    case Algorithm::kLocalSgd:
      return AlgorithmTag::kLocalSgd;
  }
  return AlgorithmTag::kNone;
}

absl::StatusOr<AvailabilitySampler> AvailabilitySampler::Create(
    int num_silos, const Availability& mode, uint64_t seed, AlgorithmTag tag) {
  if (num_silos < 1) return absl::InvalidArgumentError("need at least one silo");
  AvailabilitySampler s;
  s.num_silos_ = num_silos;
  s.seed_ = seed;
  s.tag_ = tag;
  if (const auto* fixed = std::get_if<FixedAvailability>(&mode)) {
    s.m_values_ = {fixed->m == 0 ? num_silos : fixed->m};
  } else {
    s.m_values_ = std::get<RandomAvailability>(mode).m_values;
  }
  if (s.m_values_.empty()) {
    return absl::InvalidArgumentError("random availability needs M values");
  }
  for (int m : s.m_values_) {
    if (m < 1 || m > num_silos) {
      return absl::InvalidArgumentError(
          absl::StrCat("M=", m, " must lie in [1, ", num_silos, "]"));
    }
  }
  return s;
}

std::vector<int> AvailabilitySampler::Draw(uint64_t round) const {
  RandomStream rng = DeriveStream(
      seed_, StreamKey{tag_, round, 0, Purpose::kAvailability, 0});
  int m = m_values_[0];
  if (m_values_.size() > 1) m = m_values_[rng.UniformInt(m_values_.size())];
  std::vector<int> silos(num_silos_);
  std::iota(silos.begin(), silos.end(), 0);
  if (m == num_silos_) return silos;
  for (int t = 0; t < m; ++t) {
    const int j = t + static_cast<int>(rng.UniformInt(num_silos_ - t));
    std::swap(silos[t], silos[j]);
  }
  silos.resize(m);
  std::sort(silos.begin(), silos.end());
  return silos;
}

double AvailabilitySampler::MeanInverse() const {
  double s = 0.0;
  for (int m : m_values_) s += 1.0 / m;
  return s / m_values_.size();
}

namespace internal {

absl::StatusOr<RunState> RunState::Create(const ProblemInstance& problem,
                                          const RunConfig& config,
                                          Algorithm algorithm,
                                          AlgorithmTag tag) {
  if (!problem.loss.f0) return absl::InvalidArgumentError("problem has no loss");
  if (auto s = ValidateLoss(problem.loss); !s.ok()) return s;
  RunState st;
  st.problem = &problem;
  st.config = config;
  st.tag = tag;
  st.start = std::chrono::steady_clock::now();
  auto plan = PlanNoise(algorithm, config, DimsOf(problem));
  if (!plan.ok()) return plan.status();
  st.plan = *std::move(plan);
  st.d = problem.dim();
  st.n = problem.dataset.records_per_silo();
  auto avail = AvailabilitySampler::Create(problem.dataset.num_silos(),
                                           config.availability, config.seed, tag);
  if (!avail.ok()) return avail.status();
  st.availability = *std::move(avail);
  st.accountant = PrivacyAccountant(st.plan);
  st.result.accounting = AccountingStyleName(st.plan.accounting);
  if (config.w0.empty()) {
    st.w.assign(st.d, 0.0);
  } else {
    if (static_cast<int>(config.w0.size()) != st.d) {
      return absl::InvalidArgumentError(
          absl::StrCat("w0 has dimension ", config.w0.size(), ", expected ", st.d));
    }
    if (auto s = ValidateFinite(config.w0, "w0"); !s.ok()) return s;
    st.w = config.w0;
  }
  if (auto s = st.Record(0, st.w); !s.ok()) return s;
  return st;
}

RandomStream RunState::Stream(uint64_t round, uint64_t silo, Purpose purpose,
                              uint64_t draw) const {
  return DeriveStream(config.seed, StreamKey{tag, round, silo, purpose, draw});
}

void RunState::Step(std::span<double> x, std::span<const double> h) const {
  kernels::Axpy(-plan.step_size, h, x);
  ProxInPlace(problem->loss.f1, plan.step_size, x);
}

absl::Status RunState::Record(int64_t round, std::span<const double> x) {
  auto m = Evaluate(*problem, x, plan.step_size);
  if (!m.ok()) return m.status();
  RoundRecord row;
  row.round = round;
  row.train_risk = m->empirical_risk;
  row.excess_risk = m->excess_risk;
  row.grad_mapping_norm_sq = m->grad_mapping_norm_sq;
  row.epsilon_spent = accountant.EpsilonSpent();
  if (config.record_wall_time) {
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  }
  result.rows.push_back(row);
  return absl::OkStatus();
}

double RunState::ShuffleEpsilon(int call, int m_r) const {
  return plan.shuffle_calls[call].budget.epsilon * plan.min_available / m_r;
}

absl::StatusOr<P1DParams> RunState::ShuffleParams(int call, int m_r) {
  if (config.shuffle_override.has_value()) return *config.shuffle_override;
  if (m_r == plan.min_available) return plan.shuffle_calls[call].params;
  auto it = params_cache.find({call, m_r});
  if (it != params_cache.end()) return it->second;
  const ShuffleCall& c = plan.shuffle_calls[call];
  const PrivacyBudget budget{ShuffleEpsilon(call, m_r), c.budget.delta};
  const int64_t contributors = c.contributors / plan.min_available * m_r;
  const double range = c.range > 0.0 ? c.range : 2.0 * plan.L;
  auto p = ChooseParams(budget, contributors, d, range);
  if (!p.ok()) return p.status();
  params_cache[{call, m_r}] = *p;
  return *p;
}

RunResult RunState::Finish(ModelPoint final_model, ModelPoint w_priv,
                           int64_t w_priv_index) {
  result.final_model = std::move(final_model);
  result.w_priv = std::move(w_priv);
  result.w_priv_index = w_priv_index;
  result.delta_spent = accountant.DeltaSpent();
  return std::move(result);
}

absl::StatusOr<std::vector<double>> ShuffleMean(
    RunState& st, int call, const std::vector<int>& silos, uint64_t round_key,
    uint64_t draw, double range,
    const std::function<std::vector<double>(int)>& inputs) {
  auto params = st.ShuffleParams(call, static_cast<int>(silos.size()));
  if (!params.ok()) return params.status();
  VectorSumProtocol protocol(st.d, range, *params);
  for (int i : silos) {
    const std::vector<double> block = inputs(i);
    RandomStream rng = st.Stream(round_key, i, Purpose::kShuffle, draw);
    for (size_t off = 0; off < block.size(); off += st.d) {
      protocol.Add(std::span<const double>(block.data() + off, st.d), rng);
    }
  }
  std::vector<double> est = protocol.Estimate();
  kernels::Scale(1.0 / protocol.contributors(), est);
  return est;
}

}  // namespace internal

absl::StatusOr<RunResult> RunAlgorithm(Algorithm algorithm,
                                       const ProblemInstance& problem,
                                       const RunConfig& config) {
  switch (algorithm) {
    case Algorithm::kIsrlProxSgd:
      return RunIsrlProxSgd(problem, config);
    case Algorithm::kSdpProxSgd:
      return RunSdpProxSgd(problem, config);
    case Algorithm::kIsrlSvrg:
      return RunIsrlProxSvrg(problem, config);
    case Algorithm::kIsrlPlSvrg:
      return RunIsrlProxPlSvrg(problem, config);
    case Algorithm::kSdpSvrg:
      return RunSdpProxSvrg(problem, config);
    case Algorithm::kSdpPlSvrg:
      return RunSdpProxPlSvrg(problem, config);
    case Algorithm::kIsrlSpider:
      return RunIsrlSpider(problem, config);
    case Algorithm::kSdpSpider:
      return RunSdpSpider(problem, config);
    case Algorithm::kIsrlSpiderAlt:
      return RunIsrlSpiderAlt(problem, config);
    case Algorithm::kMbSgd:
      return RunBaseline(BaselineKind::kMbSgd,
                         config.mechanism != Mechanism::kNonPrivate, problem,
                         config);
    case Algorithm::kLocalSgd:
      return RunBaseline(BaselineKind::kLocalSgd,
                         config.mechanism != Mechanism::kNonPrivate, problem,
                         config);
  }
  return absl::InvalidArgumentError("unknown algorithm");
}

}  // namespace pfl
