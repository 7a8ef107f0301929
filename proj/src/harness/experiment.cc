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

#include "pfl/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "pfl/optimizers/optimizers.h"

namespace pfl {
namespace {

using json = nlohmann::ordered_json;

json Finite(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

void RunCell(const ExperimentSpec& spec, const ProblemInstance& problem,
             CellResult& cell) {
  const int n = problem.dataset.records_per_silo();
  const double eps = std::isfinite(cell.epsilon) ? cell.epsilon : 1.0;
  RunConfig config = CellConfig(spec, cell.algorithm, eps, cell.seed, n);
  auto plan = PlanNoise(cell.algorithm, config, DimsOf(problem));
  if (!plan.ok()) {
    cell.status = plan.status();
    return;
  }
  cell.plan = *std::move(plan);
  auto run = RunAlgorithm(cell.algorithm, problem, config);
  if (!run.ok()) {
    cell.status = run.status();
    return;
  }
  cell.run = *std::move(run);
}

}  // namespace

uint64_t RepeatSeed(uint64_t base, int repeat) {
  if (repeat == 0) return base;
  return base ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(repeat));
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentSpec& spec,
                                               int threads) {
  auto problem = BuildProblem(spec.problem);
  if (!problem.ok()) return problem.status();
  ExperimentResult result;
  result.problem = *std::move(problem);

  // Non-private cells do not depend on epsilon, so the grid collapses.
  std::vector<double> eps_grid = spec.epsilons;
  if (!spec.private_runs) eps_grid = {std::numeric_limits<double>::infinity()};
  for (Algorithm a : spec.algorithms) {
    for (double eps : eps_grid) {
      for (uint64_t s : spec.seeds) {
        for (int k = 0; k < spec.repeats; ++k) {
          CellResult cell;
          cell.algorithm = a;
          cell.epsilon = eps;
          cell.seed = RepeatSeed(s, k);
          result.cells.push_back(std::move(cell));
        }
      }
    }
  }
  std::sort(result.cells.begin(), result.cells.end(),
            [](const CellResult& x, const CellResult& y) {
              return std::make_tuple(AlgorithmName(x.algorithm), x.epsilon, x.seed) <
                     std::make_tuple(AlgorithmName(y.algorithm), y.epsilon, y.seed);
            });

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < result.cells.size(); i = next++) {
      RunCell(spec, result.problem, result.cells[i]);
    }
  };
  const int workers =
      std::clamp<int>(threads, 1, std::max<int>(1, result.cells.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::vector<ResultRow> ResultRows(const ExperimentResult& result) {
  std::vector<ResultRow> rows;
  for (const CellResult& cell : result.cells) {
    ResultRow base;
    base.algorithm = AlgorithmName(cell.algorithm);
    base.epsilon = cell.epsilon;
    base.seed = cell.seed;
    if (!cell.status.ok()) {
      base.infeasible = true;
      rows.push_back(base);
      continue;
    }
    for (const RoundRecord& r : cell.run.rows) {
      ResultRow row = base;
      row.record = r;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string ExperimentSidecarJson(const ExperimentSpec& spec,
                                  const ExperimentResult& result) {
  json j;
  j["config"] = json::parse(ExperimentSpecToJson(spec));
  json desc = json::object();
  for (const auto& [k, v] : result.problem.descriptor) desc[k] = Finite(v);
  j["problem"] = {{"family", result.problem.family},
                  {"regularizer", RegularizerName(result.problem.loss.f1)},
                  {"descriptor", desc}};
  if (result.problem.known.has_value()) {
    j["problem"]["f_star"] = result.problem.known->f_star;
  }
  json cells = json::array();
  for (const CellResult& cell : result.cells) {
    json c;
    c["algorithm"] = AlgorithmName(cell.algorithm);
    c["epsilon"] = Finite(cell.epsilon);
    c["seed"] = cell.seed;
    c["status"] = cell.status.ok() ? "ok" : "infeasible";
    if (!cell.status.ok()) c["reason"] = std::string(cell.status.message());
    if (cell.plan.has_value()) c["plan"] = json::parse(NoisePlanToJson(*cell.plan));
    if (cell.status.ok()) {
      c["accounting"] = cell.run.accounting;
      c["delta_spent"] = cell.run.delta_spent;
      c["w_priv_index"] = cell.run.w_priv_index;
      if (cell.run.spider.has_value()) {
        const SpiderDiagnostics& d = *cell.run.spider;
        c["spider"] = {{"tau1_sq", Finite(d.tau1_sq)},
                       {"tau2_sq", Finite(d.tau2_sq)},
                       {"estimate_error_sq", d.estimate_error_sq},
                       {"phase_start", d.phase_start},
                       {"step_norm_sq", d.step_norm_sq}};
      }
    }
    cells.push_back(std::move(c));
  }
  j["cells"] = cells;
  return j.dump(2);
}

absl::Status WriteExperimentOutputs(const ExperimentSpec& spec,
                                    const ExperimentResult& result,
                                    const std::string& path) {
  if (auto s = WriteResultsCsv(path, ResultRows(result)); !s.ok()) return s;
  const std::string side = path + ".json";
  std::ofstream out(side, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", side));
  out << ExperimentSidecarJson(spec, result) << "\n";
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", side));
  return absl::OkStatus();
}

}  // namespace pfl
