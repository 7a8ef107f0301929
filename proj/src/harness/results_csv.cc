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

#include "pfl/harness/results_csv.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace pfl {
namespace {

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

absl::StatusOr<double> ParseNum(absl::string_view s, int line) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  double v = 0.0;
  if (!absl::SimpleAtod(s, &v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("results line ", line, ": bad number '", s, "'"));
  }
  return v;
}

}  // namespace

std::string FormatResultsCsv(const std::vector<ResultRow>& rows) {
  std::string out = absl::StrCat(kResultsHeader, "\n");
  for (const ResultRow& row : rows) {
    absl::StrAppend(&out, row.algorithm, ",", Num(row.epsilon), ",", row.seed, ",");
    if (row.infeasible) {
      absl::StrAppend(&out, "infeasible,,,,,\n");
      continue;
    }
    const RoundRecord& r = row.record;
    absl::StrAppend(&out, r.round, ",", Num(r.train_risk), ",",
                    r.excess_risk.has_value() ? Num(*r.excess_risk) : "", ",",
                    Num(r.grad_mapping_norm_sq), ",", Num(r.epsilon_spent), ",",
                    Num(r.wall_ms), "\n");
  }
  return out;
}

absl::Status WriteResultsCsv(const std::string& path,
                             const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << FormatResultsCsv(rows);
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<ResultRow>> ParseResultsCsv(const std::string& text) {
  std::vector<ResultRow> rows;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n', absl::SkipEmpty())) {
    ++line_no;
    if (line_no == 1) {
      if (line != kResultsHeader) {
        return absl::InvalidArgumentError("results file has an unexpected header");
      }
      continue;
    }
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    if (f.size() != 9) {
      return absl::InvalidArgumentError(
          absl::StrCat("results line ", line_no, ": expected 9 fields"));
    }
    ResultRow row;
    row.algorithm = std::string(f[0]);
    auto eps = ParseNum(f[1], line_no);
    if (!eps.ok()) return eps.status();
    row.epsilon = *eps;
    if (!absl::SimpleAtoi(f[2], &row.seed)) {
      return absl::InvalidArgumentError(
          absl::StrCat("results line ", line_no, ": bad seed"));
    }
    if (f[3] == "infeasible") {
      row.infeasible = true;
      rows.push_back(std::move(row));
      continue;
    }
    if (!absl::SimpleAtoi(f[3], &row.record.round)) {
      return absl::InvalidArgumentError(
          absl::StrCat("results line ", line_no, ": bad round"));
    }
    double* targets[] = {&row.record.train_risk, nullptr,
                         &row.record.grad_mapping_norm_sq,
                         &row.record.epsilon_spent, &row.record.wall_ms};
    for (int k = 0; k < 5; ++k) {
      if (k == 1 && f[5].empty()) continue;
      auto v = ParseNum(f[4 + k], line_no);
      if (!v.ok()) return v.status();
      if (k == 1) {
        row.record.excess_risk = *v;
      } else {
        *targets[k] = *v;
      }
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) return absl::InvalidArgumentError("results file is empty");
  return rows;
}

absl::StatusOr<std::vector<ResultRow>> ReadResultsCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseResultsCsv(buf.str());
}

}  // namespace pfl
