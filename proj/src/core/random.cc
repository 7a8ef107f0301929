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

#include "pfl/core/random.h"

#include <cmath>
#include <numbers>
#include <random>

namespace pfl {
namespace {

constexpr uint32_t kM0 = 0xD2511F53u;
constexpr uint32_t kM1 = 0xCD9E8D57u;
constexpr uint32_t kW0 = 0x9E3779B9u;
constexpr uint32_t kW1 = 0xBB67AE85u;

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t Chain(uint64_t h, uint64_t v) { return SplitMix64(h ^ SplitMix64(v)); }

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> c,
                                   std::array<uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kM0) * c[0];
    const uint64_t p1 = static_cast<uint64_t>(kM1) * c[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

RandomStream::RandomStream(std::array<uint32_t, 2> key, uint64_t stream_id)
    : key_(key), stream_id_(stream_id) {}

uint32_t RandomStream::NextU32() {
  if (used_ == 4) {
    buffer_ = Philox4x32({static_cast<uint32_t>(block_),
                          static_cast<uint32_t>(block_ >> 32),
                          static_cast<uint32_t>(stream_id_),
                          static_cast<uint32_t>(stream_id_ >> 32)},
                         key_);
    ++block_;
    used_ = 0;
  }
  return buffer_[used_++];
}

uint64_t RandomStream::NextU64() {
  const uint64_t hi = NextU32();
  return (hi << 32) | NextU32();
}

double RandomStream::Uniform01() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::Gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = Uniform01();
  const double u2 = Uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

uint64_t RandomStream::UniformInt(uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  uint64_t x = NextU64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = NextU64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

int64_t RandomStream::Binomial(int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  std::binomial_distribution<int64_t> dist(trials, p);
  return dist(*this);
}

void RandomStream::FillGaussian(std::span<double> out, double stddev) {
  for (double& v : out) v = stddev * Gaussian();
}

RandomStream DeriveStream(uint64_t master_seed, const StreamKey& key) {
  uint64_t h1 = Chain(0x6A09E667F3BCC908ull, master_seed);
  h1 = Chain(h1, static_cast<uint64_t>(key.tag));
  h1 = Chain(h1, static_cast<uint64_t>(key.purpose));
  uint64_t h2 = Chain(0xBB67AE8584CAA73Bull, key.round);
  h2 = Chain(h2, key.silo);
  h2 = Chain(h2, key.draw_index);
  h2 = Chain(h2, h1);
  return RandomStream({static_cast<uint32_t>(h1), static_cast<uint32_t>(h1 >> 32)},
                      h2);
}

}  // namespace pfl
