// Copyright 2026 The chaoslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "chaoslab/error.hpp"
#include "chaoslab/simd.hpp"

namespace chaoslab::simd {
namespace {

Isa detect() {
  if (const char* env = std::getenv("CHAOSLAB_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detect()};
  return slot;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(CHAOSLAB_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& table(Isa isa) {
#if defined(CHAOSLAB_HAVE_AVX2_TU)
  if (isa == Isa::avx2) {
    if (!isa_supported(Isa::avx2)) throw InvalidArgument("AVX2+FMA not supported on this CPU");
    return avx2::kTable;
  }
#endif
  if (isa != Isa::scalar) throw InvalidArgument("instruction set not compiled in");
  return scalar::kTable;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument("instruction set not supported: " + std::string(isa_name(isa)));
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

}  // namespace chaoslab::simd
