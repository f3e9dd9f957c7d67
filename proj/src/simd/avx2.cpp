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

// AVX2 + FMA variants, 4 doubles per register. Compiled with -mavx2 -mfma and
// only reached through the dispatch table after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chaoslab/rng.hpp"
#include "chaoslab/simd.hpp"

namespace chaoslab::simd::avx2 {
namespace {

constexpr std::size_t kWidth = 4;

// ---------------------------------------------------------------------------
// Elementary functions

inline __m256d int_bits_to_double(__m256i small_ints) {
  // Exact for 0 <= v < 2^52.
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(small_ints, magic)),
                       _mm256_set1_pd(0x1p52));
}

// exp(x). Range reduction x = n ln2 + r, |r| <= ln2/2, degree-13 Taylor.
// Results below the normal range flush to 0; inputs above 709 saturate.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo_limit = _mm256_set1_pd(-708.39);
  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo_limit), _mm256_set1_pd(709.0));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(std::numbers::log2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i e = _mm256_add_epi64(_mm256_cvtepi32_epi64(n32), _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(e, 52));
  return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

// log(x) for positive normal x. x = 2^e m with m in [sqrt(1/2), sqrt(2)),
// log m = 2 atanh(s), s = (m - 1)/(m + 1), |s| < 0.1716.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  __m256d e = _mm256_sub_pd(int_bits_to_double(_mm256_srli_epi64(bits, 52)),
                            _mm256_set1_pd(1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(std::numbers::sqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 23.0);
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 3.0));
  // log m = 2s + 2s^3 p
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), p, two_s);
  const __m256d hi = _mm256_fmadd_pd(e, _mm256_set1_pd(6.93147180369123816490e-01), log_m);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(1.90821492927058770002e-10), hi);
}

// sin(2 pi u), cos(2 pi u). Reduce u to r in [-1/2, 1/2], split off the
// quadrant q = round(4r) and evaluate Taylor series on |2 pi t| <= pi/4.
inline void sincos_2pi_pd(__m256d u, __m256d& s_out, __m256d& c_out) {
  constexpr int kRound = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;
  const __m256d r = _mm256_sub_pd(u, _mm256_round_pd(u, kRound));
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(r, _mm256_set1_pd(4.0)), kRound);
  const __m256d t = _mm256_fnmadd_pd(q, _mm256_set1_pd(0.25), r);
  const __m256d a = _mm256_mul_pd(t, _mm256_set1_pd(2.0 * std::numbers::pi));
  const __m256d a2 = _mm256_mul_pd(a, a);

  __m256d sp = _mm256_set1_pd(1.0 / 355687428096000.0);  // 1/17!
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(-1.0 / 1307674368000.0));
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(1.0 / 6227020800.0));
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(-1.0 / 39916800.0));
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(1.0 / 362880.0));
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(-1.0 / 5040.0));
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(1.0 / 120.0));
  sp = _mm256_fmadd_pd(sp, a2, _mm256_set1_pd(-1.0 / 6.0));
  const __m256d sin_a = _mm256_fmadd_pd(_mm256_mul_pd(sp, a2), a, a);

  __m256d cp = _mm256_set1_pd(1.0 / 6402373705728000.0);  // 1/18!
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(-1.0 / 20922789888000.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(1.0 / 87178291200.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(-1.0 / 479001600.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(1.0 / 3628800.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(-1.0 / 40320.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(1.0 / 720.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(-1.0 / 24.0));
  cp = _mm256_fmadd_pd(cp, a2, _mm256_set1_pd(0.5));
  const __m256d cos_a = _mm256_fnmadd_pd(cp, a2, _mm256_set1_pd(1.0));

  // q in {-2..2}; quadrant index q mod 4.
  const __m256d qm = _mm256_sub_pd(
      q, _mm256_mul_pd(_mm256_set1_pd(4.0),
                       _mm256_floor_pd(_mm256_mul_pd(q, _mm256_set1_pd(0.25)))));
  const __m256d is1 = _mm256_cmp_pd(qm, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(qm, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(qm, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d neg = _mm256_set1_pd(-0.0);
  const __m256d ns = _mm256_xor_pd(sin_a, neg);
  const __m256d nc = _mm256_xor_pd(cos_a, neg);

  __m256d s = sin_a;
  s = _mm256_blendv_pd(s, cos_a, is1);
  s = _mm256_blendv_pd(s, ns, is2);
  s = _mm256_blendv_pd(s, nc, is3);
  __m256d c = cos_a;
  c = _mm256_blendv_pd(c, ns, is1);
  c = _mm256_blendv_pd(c, nc, is2);
  c = _mm256_blendv_pd(c, sin_a, is3);
  s_out = s;
  c_out = c;
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

// ---------------------------------------------------------------------------
// Kernels

void sincos_2pi(const double* u, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d vs, vc;
    sincos_2pi_pd(_mm256_loadu_pd(u + i), vs, vc);
    _mm256_storeu_pd(s + i, vs);
    _mm256_storeu_pd(c + i, vc);
  }
  if (i < n) {
    alignas(32) double in[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double so[4];
    alignas(32) double co[4];
    std::copy(u + i, u + n, in);
    __m256d vs, vc;
    sincos_2pi_pd(_mm256_load_pd(in), vs, vc);
    _mm256_store_pd(so, vs);
    _mm256_store_pd(co, vc);
    std::copy(so, so + (n - i), s + i);
    std::copy(co, co + (n - i), c + i);
  }
}

PhaseSums mode_phase(const double* x1, const double* x2, int k1, int k2, double* s, double* c,
                     std::size_t n) {
  const __m256d vk1 = _mm256_set1_pd(static_cast<double>(k1));
  const __m256d vk2 = _mm256_set1_pd(static_cast<double>(k2));
  __m256d acc_s = _mm256_setzero_pd();
  __m256d acc_c = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d u = _mm256_mul_pd(vk1, _mm256_loadu_pd(x1 + i));
    if (k2 != 0) u = _mm256_fmadd_pd(vk2, _mm256_loadu_pd(x2 + i), u);
    __m256d vs, vc;
    sincos_2pi_pd(u, vs, vc);
    _mm256_storeu_pd(s + i, vs);
    _mm256_storeu_pd(c + i, vc);
    acc_s = _mm256_add_pd(acc_s, vs);
    acc_c = _mm256_add_pd(acc_c, vc);
  }
  PhaseSums sums{hsum(acc_s), hsum(acc_c)};
  if (i < n) {
    alignas(32) double u[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = i; j < n; ++j) {
      u[j - i] = static_cast<double>(k1) * x1[j];
      if (k2 != 0) u[j - i] = std::fma(static_cast<double>(k2), x2[j], u[j - i]);
    }
    alignas(32) double so[4];
    alignas(32) double co[4];
    __m256d vs, vc;
    sincos_2pi_pd(_mm256_load_pd(u), vs, vc);
    _mm256_store_pd(so, vs);
    _mm256_store_pd(co, vc);
    for (std::size_t j = i; j < n; ++j) {
      s[j] = so[j - i];
      c[j] = co[j - i];
      sums.sin_sum += s[j];
      sums.cos_sum += c[j];
    }
  }
  return sums;
}

void accumulate_modes(double* out, const double* s, const double* c, double alpha, double beta,
                      std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d o = _mm256_loadu_pd(out + i);
    o = _mm256_fmadd_pd(va, _mm256_loadu_pd(s + i), o);
    o = _mm256_fmadd_pd(vb, _mm256_loadu_pd(c + i), o);
    _mm256_storeu_pd(out + i, o);
  }
  for (; i < n; ++i) out[i] = std::fma(beta, c[i], std::fma(alpha, s[i], out[i]));
}

void em_update(double* x, const double* drift, const double* noise, double dt, double sigma,
               std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d vsig = _mm256_set1_pd(sigma);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d y = _mm256_fmadd_pd(vdt, _mm256_loadu_pd(drift + i), _mm256_loadu_pd(x + i));
    if (noise != nullptr) y = _mm256_fmadd_pd(vsig, _mm256_loadu_pd(noise + i), y);
    __m256d r = _mm256_sub_pd(y, _mm256_floor_pd(y));
    r = _mm256_andnot_pd(_mm256_cmp_pd(r, one, _CMP_GE_OQ), r);
    _mm256_storeu_pd(x + i, r);
  }
  for (; i < n; ++i) {
    double y = std::fma(dt, drift[i], x[i]);
    if (noise != nullptr) y = std::fma(sigma, noise[i], y);
    const double r = y - std::floor(y);
    x[i] = r >= 1.0 ? 0.0 : r;
  }
}

// Four Philox4x32-10 streams in parallel; word w of lane l lives in the low
// 32 bits of 64-bit lane l of register c[w].
inline void philox4_lanes(__m256i c[4], Key key) {
  const __m256i mask = _mm256_set1_epi64x(0xFFFFFFFFLL);
  const __m256i m0 = _mm256_set1_epi64x(0xD2511F53LL);
  const __m256i m1 = _mm256_set1_epi64x(0xCD9E8D57LL);
  std::uint32_t k0 = key[0];
  std::uint32_t k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    const __m256i p0 = _mm256_mul_epu32(c[0], m0);
    const __m256i p1 = _mm256_mul_epu32(c[2], m1);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i lo0 = _mm256_and_si256(p0, mask);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    const __m256i lo1 = _mm256_and_si256(p1, mask);
    const __m256i vk0 = _mm256_set1_epi64x(static_cast<long long>(k0));
    const __m256i vk1 = _mm256_set1_epi64x(static_cast<long long>(k1));
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c[1]), vk0);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c[3]), vk1);
    c[0] = n0;
    c[1] = lo1;
    c[2] = n2;
    c[3] = lo0;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
}

inline __m256d open_uniform_pd(__m256i hi, __m256i lo) {
  const __m256i bits = _mm256_or_si256(_mm256_slli_epi64(hi, 32), lo);
  const __m256d k = int_bits_to_double(_mm256_srli_epi64(bits, 12));
  return _mm256_mul_pd(_mm256_add_pd(k, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1p-52));
}

void gaussian_pairs(Key key, const std::uint32_t* streams, std::uint32_t block, std::uint32_t tag,
                    double* z0, double* z1, std::size_t n) {
  for (std::size_t i = 0; i < n; i += kWidth) {
    const std::size_t lanes = std::min(kWidth, n - i);
    alignas(32) long long ids[4] = {0, 0, 0, 0};
    for (std::size_t l = 0; l < lanes; ++l) ids[l] = static_cast<long long>(streams[i + l]);
    __m256i c[4] = {_mm256_load_si256(reinterpret_cast<const __m256i*>(ids)),
                    _mm256_set1_epi64x(static_cast<long long>(block)),
                    _mm256_set1_epi64x(static_cast<long long>(tag)), _mm256_setzero_si256()};
    philox4_lanes(c, key);
    const __m256d u1 = open_uniform_pd(c[0], c[1]);
    const __m256d u2 = open_uniform_pd(c[2], c[3]);
    const __m256d radius =
        _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log_pd(u1)));
    __m256d vs, vc;
    sincos_2pi_pd(u2, vs, vc);
    const __m256d g0 = _mm256_mul_pd(radius, vc);
    const __m256d g1 = _mm256_mul_pd(radius, vs);
    if (lanes == kWidth) {
      _mm256_storeu_pd(z0 + i, g0);
      _mm256_storeu_pd(z1 + i, g1);
    } else {
      alignas(32) double a[4];
      alignas(32) double b[4];
      _mm256_store_pd(a, g0);
      _mm256_store_pd(b, g1);
      std::copy(a, a + lanes, z0 + i);
      std::copy(b, b + lanes, z1 + i);
    }
  }
}

double logsumexp(const double* a, const double* h, double scale, std::size_t n) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const __m256d vscale = _mm256_set1_pd(scale);
  const double ninf = -std::numeric_limits<double>::infinity();
  __m256d vmax = _mm256_set1_pd(ninf);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d v = _mm256_fnmadd_pd(vscale, _mm256_loadu_pd(a + i), _mm256_loadu_pd(h + i));
    vmax = _mm256_max_pd(vmax, v);
  }
  double m = hmax(vmax);
  for (std::size_t j = i; j < n; ++j) m = std::max(m, std::fma(-scale, a[j], h[j]));
  if (!std::isfinite(m)) return m;

  const __m256d vm = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  for (i = 0; i + kWidth <= n; i += kWidth) {
    const __m256d v = _mm256_fnmadd_pd(vscale, _mm256_loadu_pd(a + i), _mm256_loadu_pd(h + i));
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(v, vm)));
  }
  double sum = hsum(acc);
  if (i < n) {
    alignas(32) double v[4] = {ninf, ninf, ninf, ninf};
    for (std::size_t j = i; j < n; ++j) v[j - i] = std::fma(-scale, a[j], h[j]) - m;
    alignas(32) double e[4];
    _mm256_store_pd(e, exp_pd(_mm256_load_pd(v)));
    for (std::size_t j = i; j < n; ++j) sum += e[j - i];
  }
  return m + std::log(sum);
}

void vexp(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) _mm256_storeu_pd(y + i, exp_pd(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double v[4] = {0.0, 0.0, 0.0, 0.0};
    std::copy(x + i, x + n, v);
    alignas(32) double e[4];
    _mm256_store_pd(e, exp_pd(_mm256_load_pd(v)));
    std::copy(e, e + (n - i), y + i);
  }
}

void vlog(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) _mm256_storeu_pd(y + i, log_pd(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double v[4] = {1.0, 1.0, 1.0, 1.0};
    std::copy(x + i, x + n, v);
    alignas(32) double e[4];
    _mm256_store_pd(e, log_pd(_mm256_load_pd(v)));
    std::copy(e, e + (n - i), y + i);
  }
}

}  // namespace

const KernelTable kTable{
    .sincos_2pi = sincos_2pi,
    .mode_phase = mode_phase,
    .accumulate_modes = accumulate_modes,
    .em_update = em_update,
    .gaussian_pairs = gaussian_pairs,
    .logsumexp = logsumexp,
    .exp = vexp,
    .log = vlog,
};

}  // namespace chaoslab::simd::avx2
