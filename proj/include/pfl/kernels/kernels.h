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

#ifndef PFL_KERNELS_KERNELS_H_
#define PFL_KERNELS_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

namespace pfl {
namespace kernels {

// Instruction sets with a kernel implementation. kScalar is the reference.
enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, size_t n);
  double (*squared_norm)(const double* a, size_t n);
  double (*squared_distance)(const double* a, const double* b, size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, size_t n);
  // out = a - b
  void (*sub)(const double* a, const double* b, double* out, size_t n);
};

const KernelTable& ScalarKernels();
// Returns nullptr when the build or the CPU lacks the instruction set.
const KernelTable* Avx2Kernels();

bool IsaAvailable(Isa isa);
Isa ActiveIsa();
// Selects the table used by the free functions below. Falls back to scalar
// when `isa` is unavailable; returns the ISA actually selected.
Isa SetActiveIsa(Isa isa);
std::string_view IsaName(Isa isa);

const KernelTable& Active();

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}
inline double SquaredNorm(std::span<const double> a) {
  return Active().squared_norm(a.data(), a.size());
}
inline double SquaredDistance(std::span<const double> a,
                              std::span<const double> b) {
  return Active().squared_distance(a.data(), b.data(), a.size());
}
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void Scale(double alpha, std::span<double> x) {
  Active().scale(alpha, x.data(), x.size());
}
inline void Sub(std::span<const double> a, std::span<const double> b,
                std::span<double> out) {
  Active().sub(a.data(), b.data(), out.data(), a.size());
}

}  // namespace kernels
}  // namespace pfl

#endif  // PFL_KERNELS_KERNELS_H_
