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

#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// simd::scalar and, on x86-64, an AVX2+FMA variant in simd::avx2. The variant
// is chosen once at startup from CPUID; CHAOSLAB_SIMD=scalar|avx2 overrides.
// Variants agree to round-off (see tests/test_simd.cpp), so results are
// bit-reproducible for a fixed machine and ISA but not across ISAs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace chaoslab::simd {

enum class Isa { scalar, avx2 };

struct PhaseSums {
  double sin_sum = 0.0;
  double cos_sum = 0.0;
};

using Key = std::array<std::uint32_t, 2>;

/// Function table for one instruction set.
struct KernelTable {
  /// s[i] = sin(2 pi u[i]), c[i] = cos(2 pi u[i]) for arbitrary real u.
  void (*sincos_2pi)(const double* u, double* s, double* c, std::size_t n);

  /// Phase of wave vector (k1, k2) at each particle, its sine and cosine, and
  /// their sums. x2 may be null when k2 == 0.
  PhaseSums (*mode_phase)(const double* x1, const double* x2, int k1, int k2, double* s,
                          double* c, std::size_t n);

  /// out[i] += alpha * s[i] + beta * c[i].
  void (*accumulate_modes)(double* out, const double* s, const double* c, double alpha,
                           double beta, std::size_t n);

  /// x[i] = wrap(x[i] + dt * drift[i] + sigma * noise[i]). noise may be null.
  void (*em_update)(double* x, const double* drift, const double* noise, double dt,
                    double sigma, std::size_t n);

  /// Two standard normals per stream from one Philox4x32-10 block with
  /// counter (streams[i], block, tag, 0), via Box-Muller.
  void (*gaussian_pairs)(Key key, const std::uint32_t* streams, std::uint32_t block,
                         std::uint32_t tag, double* z0, double* z1, std::size_t n);

  /// log sum_j exp(h[j] - scale * a[j]), max-shifted. Returns -inf for n == 0.
  double (*logsumexp)(const double* a, const double* h, double scale, std::size_t n);

  void (*exp)(const double* x, double* y, std::size_t n);
  void (*log)(const double* x, double* y, std::size_t n);
};

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

const KernelTable& table(Isa isa);

/// ISA used by the rest of the library.
Isa active_isa();

/// Overrides the active ISA (tests, benchmarking). Throws if unsupported.
void set_active_isa(Isa isa);

inline const KernelTable& active() { return table(active_isa()); }

namespace scalar {
extern const KernelTable kTable;
}
#if defined(CHAOSLAB_HAVE_AVX2_TU)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace chaoslab::simd
