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

// pflsim: runs federated private optimization experiments from a JSON config.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pfl/harness/adjacency.h"
#include "pfl/harness/config.h"
#include "pfl/harness/experiment.h"
#include "pfl/optimizers/optimizers.h"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  int threads = 1;
  bool diagnostics = false;
  int trials = 100;
};

int Fail(const absl::Status& s) {
  std::cerr << "error: " << s << "\n";
  return 1;
}

absl::StatusOr<pfl::ExperimentSpec> Load(const Flags& f) {
  auto spec = pfl::LoadExperimentSpec(f.config);
  if (!spec.ok()) return spec;
  if (f.seed.has_value()) spec->seeds = {*f.seed};
  if (f.diagnostics) spec->run.diagnostics = true;
  return spec;
}

int Run(const Flags& f, bool sweep) {
  auto spec = Load(f);
  if (!spec.ok()) return Fail(spec.status());
  if (!sweep) {
    // A single cell: first algorithm, first epsilon, first seed.
    spec->algorithms.resize(1);
    spec->epsilons.resize(1);
    spec->seeds.resize(1);
    spec->repeats = 1;
  }
  auto result = pfl::RunExperiment(*spec, f.threads);
  if (!result.ok()) return Fail(result.status());
  std::string out = f.out.empty() ? spec->output : f.out;
  if (out.empty()) out = "results.csv";
  if (auto s = pfl::WriteExperimentOutputs(*spec, *result, out); !s.ok()) {
    return Fail(s);
  }
  int infeasible = 0;
  for (const auto& cell : result->cells) {
    if (cell.status.ok()) continue;
    ++infeasible;
    std::cerr << pfl::AlgorithmName(cell.algorithm) << " eps=" << cell.epsilon
              << " seed=" << cell.seed << ": " << cell.status.message() << "\n";
  }
  std::cout << "wrote " << out << " (" << result->cells.size() << " cells, "
            << infeasible << " infeasible)\n";
  return 0;
}

int GenData(const Flags& f) {
  auto spec = Load(f);
  if (!spec.ok()) return Fail(spec.status());
  auto problem = pfl::BuildProblem(spec->problem);
  if (!problem.ok()) return Fail(problem.status());
  const std::string out = f.out.empty() ? "data.csv" : f.out;
  if (auto s = pfl::SaveCsv(problem->dataset, out); !s.ok()) return Fail(s);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int CheckPrivacy(const Flags& f) {
  auto spec = Load(f);
  if (!spec.ok()) return Fail(spec.status());
  auto problem = pfl::BuildProblem(spec->problem);
  if (!problem.ok()) return Fail(problem.status());
  const int n = problem->dataset.records_per_silo();
  for (pfl::Algorithm a : spec->algorithms) {
    for (double eps : spec->epsilons) {
      pfl::RunConfig config =
          pfl::CellConfig(*spec, a, eps, spec->seeds.front(), n);
      std::cout << "== " << pfl::AlgorithmName(a) << " eps=" << eps << "\n";
      if (config.mechanism == pfl::Mechanism::kNonPrivate) {
        std::cout << "epsilon_spent=inf (non-private)\n";
        continue;
      }
      auto plan = pfl::PlanNoise(a, config, pfl::DimsOf(*problem));
      if (!plan.ok()) {
        std::cout << "infeasible: " << plan.status().message() << "\n";
        continue;
      }
      std::cout << pfl::NoisePlanToJson(*plan) << "\n";
    }
  }
  return 0;
}

int AdjacencyProbe(const Flags& f) {
  auto spec = Load(f);
  if (!spec.ok()) return Fail(spec.status());
  auto problem = pfl::BuildProblem(spec->problem);
  if (!problem.ok()) return Fail(problem.status());
  const int n = problem->dataset.records_per_silo();
  for (pfl::Algorithm a : spec->algorithms) {
    pfl::RunConfig config = pfl::CellConfig(*spec, a, spec->epsilons.front(),
                                            spec->seeds.front(), n);
    auto checks = pfl::ProbeAdjacency(*problem, a, config, f.trials,
                                      spec->seeds.front());
    if (!checks.ok()) {
      std::cout << pfl::AlgorithmName(a) << ": " << checks.status().message() << "\n";
      continue;
    }
    for (const auto& c : *checks) {
      std::printf("%s %s %s declared=%.6g observed=%.6g trials=%d\n",
                  c.ok ? "OK  " : "FAIL", c.algorithm.c_str(), c.message.c_str(),
                  c.declared, c.max_observed, c.trials);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated private optimization simulator"};
  app.require_subcommand(1);
  Flags flags;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "experiment JSON")->required();
    sub->add_option("--seed", flags.seed, "override the seed list");
  };
  auto outputs = [&](CLI::App* sub) {
    sub->add_option("--out", flags.out, "output path");
    sub->add_option("--threads", flags.threads, "worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--diagnostics", flags.diagnostics, "record SPIDER diagnostics");
  };
  CLI::App* run = app.add_subcommand("run", "run one cell");
  common(run);
  outputs(run);
  CLI::App* sweep = app.add_subcommand("sweep", "run the full grid");
  common(sweep);
  outputs(sweep);
  CLI::App* gen = app.add_subcommand("gen-data", "write the generated dataset");
  common(gen);
  gen->add_option("--out", flags.out, "CSV path");
  CLI::App* check = app.add_subcommand("check-privacy", "print the noise plans");
  common(check);
  CLI::App* probe = app.add_subcommand("adjacency-probe", "empirical sensitivity check");
  common(probe);
  probe->add_option("--trials", flags.trials, "swaps per message")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return Run(flags, false);
  if (sweep->parsed()) return Run(flags, true);
  if (gen->parsed()) return GenData(flags);
  if (check->parsed()) return CheckPrivacy(flags);
  return AdjacencyProbe(flags);
}
