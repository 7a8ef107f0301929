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

#include "pfl/core/dataset.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace pfl {

absl::StatusOr<FederatedDataset> FederatedDataset::Create(
    int d_features, std::vector<std::vector<double>> features,
    std::vector<std::vector<double>> labels) {
  if (d_features < 1) return absl::InvalidArgumentError("d_features must be >= 1");
  if (features.empty()) return absl::InvalidArgumentError("need at least one silo");
  const size_t per_silo = features[0].size();
  if (per_silo == 0 || per_silo % d_features != 0) {
    return absl::InvalidArgumentError("silo 0 has no complete records");
  }
  const size_t n = per_silo / d_features;
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != per_silo) {
      return absl::InvalidArgumentError(absl::StrCat(
          "silo ", i, " has ", features[i].size() / d_features,
          " records, expected ", n));
    }
    for (double v : features[i]) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("silo ", i, " has a non-finite feature"));
      }
    }
  }
  if (!labels.empty()) {
    if (labels.size() != features.size()) {
      return absl::InvalidArgumentError("labels must cover every silo");
    }
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].size() != n) {
        return absl::InvalidArgumentError(
            absl::StrCat("silo ", i, " label count mismatch"));
      }
    }
  }
  FederatedDataset out;
  out.n_ = static_cast<int>(n);
  out.d_ = d_features;
  out.features_ = std::move(features);
  out.labels_ = std::move(labels);
  return out;
}

FederatedDataset FederatedDataset::WithRecord(int silo, int j,
                                              std::span<const double> x,
                                              double y) const {
  FederatedDataset copy = *this;
  std::copy(x.begin(), x.end(),
            copy.features_[silo].begin() + static_cast<size_t>(j) * d_);
  if (!copy.labels_.empty()) copy.labels_[silo][j] = y;
  return copy;
}

}  // namespace pfl
