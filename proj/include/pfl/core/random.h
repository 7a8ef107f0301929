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

#ifndef PFL_CORE_RANDOM_H_
#define PFL_CORE_RANDOM_H_

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace pfl {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

enum class AlgorithmTag : uint32_t {
  kNone = 0,
  kIsrlProxSgd,
  kSdpProxSgd,
  kIsrlSvrg,
  kSdpSvrg,
  kIsrlSpider,
  kSdpSpider,
  kIsrlSpiderAlt,
  kMbSgd,
  kLocalSgd,
  kGenerator,
  kProbe,
  kTest,
};

enum class Purpose : uint32_t {
  kAvailability = 1,
  kBatch,
  kNoise,
  kShuffle,
  kOutput,
  kData,
};

struct StreamKey {
  AlgorithmTag tag = AlgorithmTag::kNone;
  uint64_t round = 0;
  uint64_t silo = 0;
  Purpose purpose = Purpose::kNoise;
  uint64_t draw_index = 0;
};

// Counter-based stream. Satisfies UniformRandomBitGenerator so it can drive
// std distributions; Gaussians use Box-Muller on Uniform01().
class RandomStream {
 public:
  using result_type = uint64_t;

  RandomStream(std::array<uint32_t, 2> key, uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  uint64_t NextU64();
  // Uniform on the open interval (0, 1).
  double Uniform01();
  double Gaussian();
  bool Bernoulli(double p) { return Uniform01() < p; }
  // Uniform on [0, bound). bound must be positive.
  uint64_t UniformInt(uint64_t bound);
  int64_t Binomial(int64_t trials, double p);
  void FillGaussian(std::span<double> out, double stddev);

 private:
  uint32_t NextU32();

  std::array<uint32_t, 2> key_;
  uint64_t stream_id_;
  uint64_t block_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

RandomStream DeriveStream(uint64_t master_seed, const StreamKey& key);

}  // namespace pfl

#endif  // PFL_CORE_RANDOM_H_
