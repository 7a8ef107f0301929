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

#include "pfl/harness/config.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace pfl {
namespace {

using json = nlohmann::ordered_json;

absl::Status CheckKeys(const json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(where, " must be an object"));
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in ", where));
    }
  }
  return absl::OkStatus();
}

// Reads j[key] into out when present; type errors surface as json exceptions.
template <typename T>
void Opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json Finite(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

absl::StatusOr<RegularizerSpec> ParseRegularizer(const json& j) {
  if (auto s = CheckKeys(j, {"kind", "lambda", "radius"}, "regularizer"); !s.ok()) {
    return s;
  }
  const std::string kind = j.value("kind", "zero");
  RegularizerSpec f1;
  if (kind == "zero") {
    f1 = ZeroReg{};
  } else if (kind == "l1") {
    f1 = L1Reg{j.value("lambda", 0.0)};
  } else if (kind == "ball") {
    f1 = BallReg{j.value("radius", 1.0)};
  } else if (kind == "l1_ball") {
    f1 = L1BallReg{j.value("lambda", 0.0), j.value("radius", 1.0)};
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown regularizer '", kind, "'"));
  }
  if (auto s = ValidateRegularizer(f1); !s.ok()) return s;
  return f1;
}

json RegularizerToJson(const RegularizerSpec& f1) {
  json j;
  j["kind"] = RegularizerName(f1);
  if (const auto* r = std::get_if<L1Reg>(&f1)) j["lambda"] = r->lambda;
  if (const auto* r = std::get_if<BallReg>(&f1)) j["radius"] = r->radius;
  if (const auto* r = std::get_if<L1BallReg>(&f1)) {
    j["lambda"] = r->lambda;
    j["radius"] = r->radius;
  }
  return j;
}

absl::StatusOr<ProblemSpec> ParseProblem(const json& j) {
  ProblemSpec p;
  if (!j.is_object()) return absl::InvalidArgumentError("problem must be an object");
  p.generator = j.value("generator", "quadratic");
  absl::Status keys;
  if (p.generator == "quadratic") {
    keys = CheckKeys(j, {"generator", "num_silos", "records_per_silo", "dim", "mu",
                         "beta", "hetero_scale", "record_spread", "seed", "regularizer"},
                     "problem");
    auto& o = p.quadratic;
    Opt(j, "num_silos", o.num_silos);
    Opt(j, "records_per_silo", o.records_per_silo);
    Opt(j, "dim", o.dim);
    Opt(j, "mu", o.mu);
    Opt(j, "beta", o.beta);
    Opt(j, "hetero_scale", o.hetero_scale);
    Opt(j, "record_spread", o.record_spread);
    Opt(j, "seed", o.seed);
  } else if (p.generator == "least_squares") {
    keys = CheckKeys(j, {"generator", "num_silos", "records_per_silo", "dim",
                         "rank_deficit", "hetero_scale", "label_noise", "seed",
                         "regularizer"},
                     "problem");
    auto& o = p.least_squares;
    Opt(j, "num_silos", o.num_silos);
    Opt(j, "records_per_silo", o.records_per_silo);
    Opt(j, "dim", o.dim);
    Opt(j, "rank_deficit", o.rank_deficit);
    Opt(j, "hetero_scale", o.hetero_scale);
    Opt(j, "label_noise", o.label_noise);
    Opt(j, "seed", o.seed);
  } else if (p.generator == "logistic") {
    keys = CheckKeys(j, {"generator", "num_silos", "records_per_silo", "dim",
                         "label_by_silo", "radius", "separation", "seed",
                         "regularizer"},
                     "problem");
    auto& o = p.logistic;
    Opt(j, "num_silos", o.num_silos);
    Opt(j, "records_per_silo", o.records_per_silo);
    Opt(j, "dim", o.dim);
    Opt(j, "label_by_silo", o.label_by_silo);
    Opt(j, "radius", o.radius);
    Opt(j, "separation", o.separation);
    Opt(j, "seed", o.seed);
  } else if (p.generator == "csv") {
    keys = CheckKeys(j, {"generator", "path", "family", "d_features", "has_label",
                         "truncate", "radius", "regularizer"},
                     "problem");
    Opt(j, "path", p.csv_path);
    Opt(j, "family", p.csv_family);
    Opt(j, "d_features", p.csv_schema.d_features);
    Opt(j, "has_label", p.csv_schema.has_label);
    Opt(j, "truncate", p.csv_schema.truncate);
    Opt(j, "radius", p.csv_radius);
    if (p.csv_path.empty()) return absl::InvalidArgumentError("csv problem needs a path");
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown generator '", p.generator, "'"));
  }
  if (!keys.ok()) return keys;
  if (j.contains("regularizer")) {
    auto f1 = ParseRegularizer(j.at("regularizer"));
    if (!f1.ok()) return f1.status();
    p.regularizer = *f1;
  }
  return p;
}

json ProblemToJson(const ProblemSpec& p) {
  json j;
  j["generator"] = p.generator;
  if (p.generator == "quadratic") {
    const auto& o = p.quadratic;
    j["num_silos"] = o.num_silos;
    j["records_per_silo"] = o.records_per_silo;
    j["dim"] = o.dim;
    j["mu"] = o.mu;
    j["beta"] = o.beta;
    j["hetero_scale"] = o.hetero_scale;
    j["record_spread"] = o.record_spread;
    j["seed"] = o.seed;
  } else if (p.generator == "least_squares") {
    const auto& o = p.least_squares;
    j["num_silos"] = o.num_silos;
    j["records_per_silo"] = o.records_per_silo;
    j["dim"] = o.dim;
    j["rank_deficit"] = o.rank_deficit;
    j["hetero_scale"] = o.hetero_scale;
    j["label_noise"] = o.label_noise;
    j["seed"] = o.seed;
  } else if (p.generator == "logistic") {
    const auto& o = p.logistic;
    j["num_silos"] = o.num_silos;
    j["records_per_silo"] = o.records_per_silo;
    j["dim"] = o.dim;
    j["label_by_silo"] = o.label_by_silo;
    j["radius"] = o.radius;
    j["separation"] = o.separation;
    j["seed"] = o.seed;
  } else {
    j["path"] = p.csv_path;
    j["family"] = p.csv_family;
    j["d_features"] = p.csv_schema.d_features;
    j["has_label"] = p.csv_schema.has_label;
    j["truncate"] = p.csv_schema.truncate;
    j["radius"] = p.csv_radius;
  }
  if (p.regularizer.has_value()) j["regularizer"] = RegularizerToJson(*p.regularizer);
  return j;
}

absl::Status ParseRun(const json& j, RunConfig& c) {
  if (auto s = CheckKeys(j, {"rounds", "epochs", "epoch_length", "restarts",
                             "batch_size", "batch_size_refresh", "batch_size_diff",
                             "phase_length", "step_size", "local_steps",
                             "availability", "clip_threshold", "calibration",
                             "spider_slope_noise", "spider_auto", "gap_estimate",
                             "diagnostics", "record_wall_time", "shuffle_override",
                             "w0"},
                         "run");
      !s.ok()) {
    return s;
  }
  Opt(j, "rounds", c.rounds);
  Opt(j, "epochs", c.epochs);
  Opt(j, "epoch_length", c.epoch_length);
  Opt(j, "restarts", c.restarts);
  Opt(j, "batch_size", c.batch_size);
  Opt(j, "batch_size_refresh", c.batch_size_refresh);
  Opt(j, "batch_size_diff", c.batch_size_diff);
  Opt(j, "phase_length", c.phase_length);
  if (j.contains("step_size")) c.step_size = j.at("step_size").get<double>();
  Opt(j, "local_steps", c.local_steps);
  Opt(j, "clip_threshold", c.clip_threshold);
  Opt(j, "spider_slope_noise", c.spider_slope_noise);
  Opt(j, "spider_auto", c.spider_auto);
  if (j.contains("gap_estimate")) c.gap_estimate = j.at("gap_estimate").get<double>();
  Opt(j, "diagnostics", c.diagnostics);
  Opt(j, "record_wall_time", c.record_wall_time);
  Opt(j, "w0", c.w0);
  if (j.contains("calibration")) {
    const std::string cal = j.at("calibration").get<std::string>();
    if (cal == "certified") {
      c.calibration = NoiseCalibration::kCertified;
    } else if (cal == "published") {
      c.calibration = NoiseCalibration::kPublished;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown calibration '", cal, "'"));
    }
  }
  if (j.contains("availability")) {
    const json& a = j.at("availability");
    if (auto s = CheckKeys(a, {"mode", "m", "m_values"}, "availability"); !s.ok()) {
      return s;
    }
    const std::string mode = a.value("mode", "fixed");
    if (mode == "fixed") {
      if (a.contains("m_values")) {
        return absl::InvalidArgumentError("fixed availability takes m, not m_values");
      }
      c.availability = FixedAvailability{a.value("m", 0)};
    } else if (mode == "random") {
      if (a.contains("m")) {
        return absl::InvalidArgumentError("random availability takes m_values, not m");
      }
      c.availability = RandomAvailability{a.value("m_values", std::vector<int>{})};
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown availability mode '", mode, "'"));
    }
  }
  if (j.contains("shuffle_override")) {
    const json& o = j.at("shuffle_override");
    if (auto s = CheckKeys(o, {"g", "b", "p"}, "shuffle_override"); !s.ok()) return s;
    P1DParams p;
    Opt(o, "g", p.g);
    Opt(o, "b", p.b);
    Opt(o, "p", p.p);
    c.shuffle_override = p;
  }
  return absl::OkStatus();
}

json RunToJson(const RunConfig& c) {
  json j;
  j["rounds"] = c.rounds;
  j["epochs"] = c.epochs;
  j["epoch_length"] = c.epoch_length;
  j["restarts"] = c.restarts;
  j["batch_size"] = c.batch_size;
  j["batch_size_refresh"] = c.batch_size_refresh;
  j["batch_size_diff"] = c.batch_size_diff;
  j["phase_length"] = c.phase_length;
  if (c.step_size.has_value()) j["step_size"] = *c.step_size;
  j["local_steps"] = c.local_steps;
  if (const auto* f = std::get_if<FixedAvailability>(&c.availability)) {
    j["availability"] = {{"mode", "fixed"}, {"m", f->m}};
  } else {
    j["availability"] = {{"mode", "random"},
                         {"m_values", std::get<RandomAvailability>(c.availability).m_values}};
  }
  j["clip_threshold"] = c.clip_threshold;
  j["calibration"] = c.calibration == NoiseCalibration::kPublished ? "published" : "certified";
  j["spider_slope_noise"] = c.spider_slope_noise;
  j["spider_auto"] = c.spider_auto;
  if (c.gap_estimate.has_value()) j["gap_estimate"] = *c.gap_estimate;
  j["diagnostics"] = c.diagnostics;
  j["record_wall_time"] = c.record_wall_time;
  if (c.shuffle_override.has_value()) {
    j["shuffle_override"] = {{"g", c.shuffle_override->g},
                             {"b", c.shuffle_override->b},
                             {"p", c.shuffle_override->p}};
  }
  if (!c.w0.empty()) j["w0"] = c.w0;
  return j;
}

absl::StatusOr<ExperimentSpec> ParseSpecJson(const json& j) {
  if (auto s = CheckKeys(j, {"schema_version", "problem", "algorithms", "epsilons",
                             "delta_rule", "delta", "repeats", "seeds", "private",
                             "output", "run"},
                         "config");
      !s.ok()) {
    return s;
  }
  if (!j.contains("schema_version")) {
    return absl::InvalidArgumentError("config needs schema_version");
  }
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    return absl::InvalidArgumentError(absl::StrCat(
        "unsupported schema_version ", version, " (expected ", kSchemaVersion, ")"));
  }
  ExperimentSpec spec;
  if (j.contains("problem")) {
    auto p = ParseProblem(j.at("problem"));
    if (!p.ok()) return p.status();
    spec.problem = *std::move(p);
  }
  for (const auto& name : j.value("algorithms", std::vector<std::string>{})) {
    auto a = ParseAlgorithm(name);
    if (!a.ok()) return a.status();
    spec.algorithms.push_back(*a);
  }
  if (spec.algorithms.empty()) {
    return absl::InvalidArgumentError("algorithm list is empty");
  }
  Opt(j, "epsilons", spec.epsilons);
  if (spec.epsilons.empty()) return absl::InvalidArgumentError("epsilon grid is empty");
  for (double e : spec.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      return absl::InvalidArgumentError("epsilons must be positive and finite");
    }
  }
  const std::string rule = j.value("delta_rule", "one_over_n_sq");
  if (rule == "one_over_n_sq") {
    spec.delta_rule = DeltaRule::kOneOverNSq;
  } else if (rule == "fixed") {
    spec.delta_rule = DeltaRule::kFixed;
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown delta_rule '", rule, "'"));
  }
  Opt(j, "delta", spec.delta);
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  Opt(j, "repeats", spec.repeats);
  if (spec.repeats < 1) return absl::InvalidArgumentError("repeats must be >= 1");
  Opt(j, "seeds", spec.seeds);
  if (spec.seeds.empty()) spec.seeds = {0};
  Opt(j, "private", spec.private_runs);
  Opt(j, "output", spec.output);
  if (j.contains("run")) {
    if (auto s = ParseRun(j.at("run"), spec.run); !s.ok()) return s;
  }
  return spec;
}

}  // namespace

absl::StatusOr<ProblemInstance> BuildProblem(const ProblemSpec& spec) {
  absl::StatusOr<ProblemInstance> p;
  if (spec.generator == "quadratic") {
    p = MakeQuadratic(spec.quadratic);
  } else if (spec.generator == "least_squares") {
    p = MakeLeastSquares(spec.least_squares);
  } else if (spec.generator == "logistic") {
    p = MakeLogistic(spec.logistic);
  } else if (spec.generator == "csv") {
    auto data = LoadCsv(spec.csv_path, spec.csv_schema);
    if (!data.ok()) return data.status();
    p = ProblemFromDataset(*std::move(data), spec.csv_family, spec.csv_radius);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown generator '", spec.generator, "'"));
  }
  if (!p.ok()) return p.status();
  if (spec.regularizer.has_value()) {
    return WithRegularizer(*std::move(p), *spec.regularizer);
  }
  return p;
}

absl::StatusOr<ExperimentSpec> ParseExperimentSpec(const std::string& json_text) {
  try {
    return ParseSpecJson(json::parse(json_text));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
}

absl::StatusOr<ExperimentSpec> LoadExperimentSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentSpec(buf.str());
}

std::string ExperimentSpecToJson(const ExperimentSpec& spec) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["problem"] = ProblemToJson(spec.problem);
  json algs = json::array();
  for (Algorithm a : spec.algorithms) algs.push_back(AlgorithmName(a));
  j["algorithms"] = algs;
  j["epsilons"] = spec.epsilons;
  j["delta_rule"] = spec.delta_rule == DeltaRule::kFixed ? "fixed" : "one_over_n_sq";
  j["delta"] = spec.delta;
  j["repeats"] = spec.repeats;
  j["seeds"] = spec.seeds;
  j["private"] = spec.private_runs;
  j["output"] = spec.output;
  j["run"] = RunToJson(spec.run);
  return j.dump(2);
}

double ResolveDelta(const ExperimentSpec& spec, int records_per_silo) {
  if (spec.delta_rule == DeltaRule::kFixed) return spec.delta;
  const double n = records_per_silo;
  return 1.0 / (n * n);
}

RunConfig CellConfig(const ExperimentSpec& spec, Algorithm algorithm,
                     double epsilon, uint64_t seed, int records_per_silo) {
  RunConfig c = spec.run;
  c.privacy = PrivacyBudget{epsilon, ResolveDelta(spec, records_per_silo)};
  c.seed = seed;
  if (!spec.private_runs) {
    c.mechanism = Mechanism::kNonPrivate;
  } else if (IsShuffleAlgorithm(algorithm)) {
    c.mechanism = Mechanism::kShuffleBinomial;
  } else {
    c.mechanism = Mechanism::kIsrlGaussian;
  }
  return c;
}

std::string NoisePlanToJson(const NoisePlan& plan) {
  json j;
  j["algorithm"] = AlgorithmName(plan.algorithm);
  j["mechanism"] = MechanismName(plan.mechanism);
  j["calibration"] = plan.calibration == NoiseCalibration::kPublished ? "published" : "certified";
  j["epsilon"] = Finite(plan.budget.epsilon);
  j["delta"] = plan.budget.delta;
  j["L"] = plan.L;
  j["beta"] = plan.dims.smooth_beta;
  j["num_silos"] = plan.dims.num_silos;
  j["records_per_silo"] = plan.dims.records_per_silo;
  j["dim"] = plan.dims.dim;
  j["rounds"] = plan.rounds;
  j["epochs"] = plan.epochs;
  j["epoch_length"] = plan.epoch_length;
  j["restarts"] = plan.restarts;
  j["batch_size"] = plan.batch_size;
  j["batch_size_refresh"] = plan.batch_refresh;
  j["batch_size_diff"] = plan.batch_diff;
  j["phase_length"] = plan.phase_length;
  j["local_steps"] = plan.local_steps;
  j["min_available"] = plan.min_available;
  j["mean_inverse_available"] = plan.mean_inverse_available;
  j["step_size"] = plan.step_size;
  j["return_initial_point"] = plan.return_initial_point;
  auto vars = [](const GaussianVariances& v) {
    return json{{"sigma_sq", Finite(v.sigma_sq)},
                {"sigma1_sq", Finite(v.sigma1_sq)},
                {"sigma2_sq", Finite(v.sigma2_sq)},
                {"sigma2_cap_sq", Finite(v.sigma2_cap_sq)}};
  };
  j["published_variances"] = vars(plan.published);
  j["effective_variances"] = vars(plan.effective);
  j["calibration_factor"] = plan.calibration_factor;
  j["accounting"] = AccountingStyleName(plan.accounting);
  j["projected_epsilon"] = Finite(plan.projected_epsilon);
  j["projected_epsilon_published_constants"] = Finite(plan.projected_epsilon_published);
  j["projected_delta"] = plan.projected_delta;
  json calls = json::array();
  for (const ShuffleCall& c : plan.shuffle_calls) {
    calls.push_back({{"name", c.name},
                     {"epsilon", c.budget.epsilon},
                     {"delta", c.budget.delta},
                     {"range", c.range},
                     {"contributors", c.contributors},
                     {"g", c.params.g},
                     {"b", c.params.b},
                     {"p", c.params.p}});
  }
  j["shuffle_calls"] = calls;
  json formulas = json::object();
  for (const auto& [name, f] : plan.formulas) formulas[name] = f;
  j["formulas"] = formulas;
  j["constraints"] = plan.constraints;
  return j.dump(2);
}

}  // namespace pfl
