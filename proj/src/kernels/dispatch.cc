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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "pfl/kernels/kernels.h"

namespace pfl {
namespace kernels {

#ifdef PFL_HAVE_AVX2
const KernelTable* Avx2TableImpl();
#endif

namespace {

bool CpuHasAvx2() {
#if defined(PFL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

// PFL_ISA=scalar forces the reference kernels for a whole process.
Isa InitialIsa() {
  const char* env = std::getenv("PFL_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
  return CpuHasAvx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{
      InitialIsa() == Isa::kAvx2 ? Avx2Kernels() : &ScalarKernels()};
  return slot;
}

}  // namespace

const KernelTable* Avx2Kernels() {
#ifdef PFL_HAVE_AVX2
  static const bool ok = CpuHasAvx2();
  return ok ? Avx2TableImpl() : nullptr;
#else
  return nullptr;
#endif
}

bool IsaAvailable(Isa isa) {
  return isa == Isa::kScalar || Avx2Kernels() != nullptr;
}

Isa ActiveIsa() {
  return Slot().load(std::memory_order_acquire) == &ScalarKernels()
             ? Isa::kScalar
             : Isa::kAvx2;
}

Isa SetActiveIsa(Isa isa) {
  const KernelTable* t = &ScalarKernels();
  if (isa == Isa::kAvx2 && Avx2Kernels() != nullptr) t = Avx2Kernels();
  Slot().store(t, std::memory_order_release);
  return ActiveIsa();
}

std::string_view IsaName(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& Active() { return *Slot().load(std::memory_order_acquire); }

}  // namespace kernels
}  // namespace pfl
