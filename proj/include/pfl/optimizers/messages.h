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

#ifndef PFL_OPTIMIZERS_MESSAGES_H_
#define PFL_OPTIMIZERS_MESSAGES_H_

#include <span>
#include <vector>

#include "pfl/core/dataset.h"
#include "pfl/core/loss.h"
#include "pfl/core/random.h"

namespace pfl {

// Pre-noise silo messages. The runners and the adjacency probe both call
// these, so the probe measures exactly what the algorithms send.

// k distinct indices from [0, n), ascending. Empty when k == n (all records).
std::vector<int> SampleDistinct(int n, int k, RandomStream& rng);

// Mean over `indices` (all when empty) of gradients clipped to L.
void MeanClippedGradient(const SmoothLoss& f0, const FederatedDataset& data,
                         int silo, std::span<const int> indices,
                         std::span<const double> w, double L,
                         std::span<double> out);

// Mean of clip(grad(w)) - clip(grad(w_prev)); each per-record difference is
// clipped again to diff_clip.
void MeanClippedDifference(const SmoothLoss& f0, const FederatedDataset& data,
                           int silo, std::span<const int> indices,
                           std::span<const double> w,
                           std::span<const double> w_prev, double L,
                           double diff_clip, std::span<double> out);

// Per-record inputs of the shuffle protocol, row-major (count x d).
std::vector<double> ClippedGradients(const SmoothLoss& f0,
                                     const FederatedDataset& data, int silo,
                                     std::span<const int> indices,
                                     std::span<const double> w, double L);
std::vector<double> ClippedDifferences(const SmoothLoss& f0,
                                       const FederatedDataset& data, int silo,
                                       std::span<const int> indices,
                                       std::span<const double> w,
                                       std::span<const double> w_prev,
                                       double L, double diff_clip);

// Adds N(0, variance I) drawn from rng. No-op for variance 0.
void AddGaussianNoise(std::span<double> v, double variance, RandomStream& rng);

}  // namespace pfl

#endif  // PFL_OPTIMIZERS_MESSAGES_H_
