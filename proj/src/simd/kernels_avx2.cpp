#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "expcomp/simd/kernels.hpp"

namespace expcomp::simd::avx2 {
namespace {

// Cephes-style exp: x = n·ln2 + r with a two-constant Cody-Waite split, then
// exp(r) = 1 + 2r·P(r²) / (Q(r²) - r·P(r²)). About 1 ulp on [-708, 709].
constexpr double kLog2e = 1.4426950408889634073599;
constexpr double kC1 = 6.93145751953125e-1;
constexpr double kC2 = 1.42860682030941723212e-6;
constexpr double kP0 = 1.26177193074810590878e-4;
constexpr double kP1 = 3.02994407707441961300e-2;
constexpr double kP2 = 9.99999999999999999910e-1;
constexpr double kQ0 = 3.00198505138664455042e-6;
constexpr double kQ1 = 2.52448340349684104192e-3;
constexpr double kQ2 = 2.27265548208155028766e-1;
constexpr double kQ3 = 2.00000000000000000009e0;
constexpr double kExpLo = -708.0;
constexpr double kExpHi = 709.0;

inline __m256d exp4(__m256d x) {
  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(fx, _mm256_set1_pd(kC1)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(fx, _mm256_set1_pd(kC2)));
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kP0), rr), _mm256_set1_pd(kP1));
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(kP2));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kQ0), rr), _mm256_set1_pd(kQ1));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(kQ2));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(kQ3));

  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  // 2^n via the exponent field; n in [-1022, 1023] for the accepted range.
  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(n64));
}

}  // namespace

void scaled_exp(std::span<const double> x, double scale, std::span<double> out) {
  const std::size_t n = x.size();
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d lo = _mm256_set1_pd(kExpLo);
  const __m256d hi = _mm256_set1_pd(kExpHi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg = _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), vscale);
    const __m256d in_range = _mm256_and_pd(_mm256_cmp_pd(arg, lo, _CMP_GE_OQ),
                                           _mm256_cmp_pd(arg, hi, _CMP_LE_OQ));
    if (_mm256_movemask_pd(in_range) == 0xF) {
      _mm256_storeu_pd(out.data() + i, exp4(arg));
    } else {
      for (std::size_t j = i; j < i + 4; ++j) out[j] = std::exp(scale * x[j]);
    }
  }
  for (; i < n; ++i) out[i] = std::exp(scale * x[i]);
}

std::optional<std::size_t> first_bracketed(std::span<const double> prefix,
                                           std::span<const double> powers,
                                           const LinearFractional& f) {
  const std::size_t n = powers.size();
  if (n < 2) return std::nullopt;
  const __m256d p = _mm256_set1_pd(f.p);
  const __m256d q = _mm256_set1_pd(f.q);
  const __m256d r = _mm256_set1_pd(f.r);
  const __m256d u = _mm256_set1_pd(f.u);
  const __m256d v = _mm256_set1_pd(f.v);
  const __m256d w = _mm256_set1_pd(f.w);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d md = _mm256_setr_pd(1.0, 2.0, 3.0, 4.0);

  std::size_t m = 1;
  for (; m + 3 < n; m += 4) {
    const __m256d s = _mm256_loadu_pd(prefix.data() + (m - 1));
    const __m256d lower = _mm256_loadu_pd(powers.data() + (m - 1));
    const __m256d upper = _mm256_loadu_pd(powers.data() + m);
    const __m256d num = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(p, s), _mm256_mul_pd(q, md)), r);
    const __m256d den = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(u, s), _mm256_mul_pd(v, md)), w);
    const __m256d theta = _mm256_div_pd(num, den);
    __m256d ok = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(lower, theta, _CMP_LE_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(theta, upper, _CMP_LE_OQ));
    const int mask = _mm256_movemask_pd(ok);
    if (mask != 0) return m + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
    md = _mm256_add_pd(md, step);
  }
  for (; m < n; ++m) {
    const double s = prefix[m - 1];
    const double mm = static_cast<double>(m);
    const double num = (f.p * s + f.q * mm) + f.r;
    const double den = (f.u * s + f.v * mm) + f.w;
    if (!(den > 0.0)) continue;
    const double theta = num / den;
    if (powers[m - 1] <= theta && theta <= powers[m]) return m;
  }
  return std::nullopt;
}

double lane_sum(std::span<const double> x) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t blocks = x.size() / 4;
  for (std::size_t b = 0; b < blocks; ++b) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + 4 * b));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t i = 4 * blocks; i < x.size(); ++i) total += x[i];
  return total;
}

}  // namespace expcomp::simd::avx2
