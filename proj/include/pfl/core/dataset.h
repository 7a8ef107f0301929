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

#ifndef PFL_CORE_DATASET_H_
#define PFL_CORE_DATASET_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace pfl {

struct RecordView {
  std::span<const double> x;
  double y = 0.0;  // 0 when the dataset is unlabeled
};

// N silos with exactly n records each. Features are stored row-major per silo.
class FederatedDataset {
 public:
  FederatedDataset() = default;
  // features[i] holds n * d values; labels is empty or holds N vectors of n.
  static absl::StatusOr<FederatedDataset> Create(
      int d_features, std::vector<std::vector<double>> features,
      std::vector<std::vector<double>> labels);

  int num_silos() const { return static_cast<int>(features_.size()); }
  int records_per_silo() const { return n_; }
  int d_features() const { return d_; }
  bool has_labels() const { return !labels_.empty(); }

  RecordView record(int silo, int j) const {
    return {std::span<const double>(features_[silo]).subspan(
                static_cast<size_t>(j) * d_, d_),
            labels_.empty() ? 0.0 : labels_[silo][j]};
  }
  const std::vector<double>& silo_features(int silo) const {
    return features_[silo];
  }
  const std::vector<double>& silo_labels(int silo) const {
    return labels_[silo];
  }

  // Copy with record j of `silo` replaced.
  FederatedDataset WithRecord(int silo, int j, std::span<const double> x,
                              double y) const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<std::vector<double>> features_;
  std::vector<std::vector<double>> labels_;
};

}  // namespace pfl

#endif  // PFL_CORE_DATASET_H_
