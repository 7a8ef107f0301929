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

#include "pfl/optimizers/messages.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pfl/kernels/kernels.h"

namespace pfl {

std::vector<int> SampleDistinct(int n, int k, RandomStream& rng) {
  if (k >= n) return {};
  // Partial Fisher-Yates over the first k slots.
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int t = 0; t < k; ++t) {
    const int j = t + static_cast<int>(rng.UniformInt(n - t));
    std::swap(pool[t], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void MeanClippedGradient(const SmoothLoss& f0, const FederatedDataset& data,
                         int silo, std::span<const int> indices,
                         std::span<const double> w, double L,
                         std::span<double> out) {
  std::vector<double> scratch(w.size());
  SiloMeanGradient(f0, data, silo, indices, w, L, out, scratch);
}

void MeanClippedDifference(const SmoothLoss& f0, const FederatedDataset& data,
                           int silo, std::span<const int> indices,
                           std::span<const double> w,
                           std::span<const double> w_prev, double L,
                           double diff_clip, std::span<double> out) {
  const size_t d = w.size();
  std::vector<double> a(d), b(d);
  std::fill(out.begin(), out.end(), 0.0);
  const int count = indices.empty() ? data.records_per_silo()
                                    : static_cast<int>(indices.size());
  for (int t = 0; t < count; ++t) {
    const RecordView r = data.record(silo, indices.empty() ? t : indices[t]);
    f0.Gradient(w, r, a);
    ClipInPlace(a, L);
    f0.Gradient(w_prev, r, b);
    ClipInPlace(b, L);
    kernels::Sub(a, b, a);
    ClipInPlace(a, diff_clip);
    kernels::Axpy(1.0, a, out);
  }
  kernels::Scale(1.0 / count, out);
}

std::vector<double> ClippedGradients(const SmoothLoss& f0,
                                     const FederatedDataset& data, int silo,
                                     std::span<const int> indices,
                                     std::span<const double> w, double L) {
  const size_t d = w.size();
  const int count = indices.empty() ? data.records_per_silo()
                                    : static_cast<int>(indices.size());
  std::vector<double> out(d * count);
  for (int t = 0; t < count; ++t) {
    std::span<double> row(out.data() + t * d, d);
    f0.Gradient(w, data.record(silo, indices.empty() ? t : indices[t]), row);
    ClipInPlace(row, L);
  }
  return out;
}

std::vector<double> ClippedDifferences(const SmoothLoss& f0,
                                       const FederatedDataset& data, int silo,
                                       std::span<const int> indices,
                                       std::span<const double> w,
                                       std::span<const double> w_prev,
                                       double L, double diff_clip) {
  const size_t d = w.size();
  const int count = indices.empty() ? data.records_per_silo()
                                    : static_cast<int>(indices.size());
  std::vector<double> out(d * count), b(d);
  for (int t = 0; t < count; ++t) {
    std::span<double> row(out.data() + t * d, d);
    const RecordView r = data.record(silo, indices.empty() ? t : indices[t]);
    f0.Gradient(w, r, row);
    ClipInPlace(row, L);
    f0.Gradient(w_prev, r, b);
    ClipInPlace(b, L);
    kernels::Sub(row, b, row);
    ClipInPlace(row, diff_clip);
  }
  return out;
}

void AddGaussianNoise(std::span<double> v, double variance, RandomStream& rng) {
  if (variance == 0.0) return;
  std::vector<double> noise(v.size());
  rng.FillGaussian(noise, std::sqrt(variance));
  kernels::Axpy(1.0, noise, v);
}

}  // namespace pfl
