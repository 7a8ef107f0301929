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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "pfl/problems/problems.h"

namespace pfl {
namespace {

bool ParseDouble(absl::string_view s, double& out) {
  s = absl::StripAsciiWhitespace(s);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

absl::StatusOr<FederatedDataset> LoadCsv(const std::string& path,
                                         const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::map<long long, std::vector<std::vector<double>>> rows_by_silo;
  int width = schema.d_features > 0
                  ? schema.d_features + 1 + (schema.has_label ? 1 : 0)
                  : 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    if (line_no == 1 && absl::StartsWith(line, "silo_id")) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (width == 0) {
      width = static_cast<int>(cells.size());
      if (width < 2 + (schema.has_label ? 1 : 0)) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", line_no, ": too few columns"));
      }
    }
    if (static_cast<int>(cells.size()) != width) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_no, ": expected ", width, " columns, got ", cells.size()));
    }
    std::vector<double> values(width);
    for (int c = 0; c < width; ++c) {
      if (!ParseDouble(cells[c], values[c])) {
        return absl::InvalidArgumentError(absl::StrCat(
            path, ":", line_no, ": non-numeric cell '", cells[c], "'"));
      }
    }
    const double id = values[0];
    if (id != std::floor(id)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": silo_id must be an integer"));
    }
    rows_by_silo[static_cast<long long>(id)].push_back(std::move(values));
  }
  if (rows_by_silo.empty()) return absl::InvalidArgumentError(absl::StrCat(path, ": no rows"));

  size_t min_count = SIZE_MAX, max_count = 0;
  for (const auto& [id, rows] : rows_by_silo) {
    min_count = std::min(min_count, rows.size());
    max_count = std::max(max_count, rows.size());
  }
  if (min_count != max_count && !schema.truncate) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": silos have between ", min_count, " and ", max_count,
        " records; pass truncate to trim to the minimum"));
  }
  const int d = width - 1 - (schema.has_label ? 1 : 0);
  std::vector<std::vector<double>> features, labels;
  for (const auto& [id, rows] : rows_by_silo) {
    std::vector<double> f;
    std::vector<double> l;
    f.reserve(min_count * d);
    for (size_t j = 0; j < min_count; ++j) {
      f.insert(f.end(), rows[j].begin() + 1, rows[j].begin() + 1 + d);
      if (schema.has_label) l.push_back(rows[j][1 + d]);
    }
    features.push_back(std::move(f));
    if (schema.has_label) labels.push_back(std::move(l));
  }
  return FederatedDataset::Create(d, std::move(features), std::move(labels));
}

absl::Status SaveCsv(const FederatedDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << "silo_id";
  for (int k = 0; k < data.d_features(); ++k) out << ",x" << k;
  if (data.has_labels()) out << ",label";
  out << '\n';
  char buf[32];
  for (int i = 0; i < data.num_silos(); ++i) {
    for (int j = 0; j < data.records_per_silo(); ++j) {
      const RecordView r = data.record(i, j);
      out << i;
      for (double v : r.x) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
      }
      if (data.has_labels()) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.y);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

}  // namespace pfl
