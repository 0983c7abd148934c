// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "monotest/simd_kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace monotest::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

double sum_inverse_minus_one(const double* u, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_sub_pd(_mm256_div_pd(one, _mm256_loadu_pd(u + i)), one));
    acc1 = _mm256_add_pd(acc1, _mm256_sub_pd(_mm256_div_pd(one, _mm256_loadu_pd(u + i + 4)), one));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += 1.0 / u[i] - 1.0;
  return acc;
}

double sum_inverse(const double* x, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_div_pd(one, _mm256_loadu_pd(x + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_div_pd(one, _mm256_loadu_pd(x + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += 1.0 / x[i];
  return acc;
}

double sum_inverse_gap(const double* x, std::size_t n, std::uint64_t first_k) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d step = _mm256_set1_pd(4.0);
  const double k0 = static_cast<double>(first_k);
  __m256d k = _mm256_setr_pd(k0, k0 + 1.0, k0 + 2.0, k0 + 3.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d term =
        _mm256_sub_pd(_mm256_div_pd(one, _mm256_loadu_pd(x + i)), _mm256_div_pd(one, k));
    acc = _mm256_add_pd(acc, term);
    k = _mm256_add_pd(k, step);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += 1.0 / x[i] - 1.0 / static_cast<double>(first_k + i);
  return total;
}

double min_value(const double* x, std::size_t n) {
  __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_min_pd(m, _mm256_loadu_pd(x + i));
  double r = hmin(m);
  for (; i < n; ++i) r = x[i] < r ? x[i] : r;
  return r;
}

double max_value(const double* x, std::size_t n) {
  __m256d m = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
  double r = hmax(m);
  for (; i < n; ++i) r = x[i] > r ? x[i] : r;
  return r;
}

void pair_sum_diff(const double* in, double* sums, double* diffs, std::size_t n_pairs) {
  std::size_t j = 0;
  for (; j + 4 <= n_pairs; j += 4) {
    const __m256d v0 = _mm256_loadu_pd(in + 2 * j);      // a0 b0 a1 b1
    const __m256d v1 = _mm256_loadu_pd(in + 2 * j + 4);  // a2 b2 a3 b3
    // hadd/hsub interleave 128-bit lanes: (p0, p2, p1, p3) -> reorder.
    const __m256d s = _mm256_permute4x64_pd(_mm256_hadd_pd(v0, v1), 0b11011000);
    // swap within pairs so hsub yields b - a directly (no -0 from negation)
    const __m256d w0 = _mm256_permute_pd(v0, 0b0101);
    const __m256d w1 = _mm256_permute_pd(v1, 0b0101);
    const __m256d d = _mm256_permute4x64_pd(_mm256_hsub_pd(w0, w1), 0b11011000);
    _mm256_storeu_pd(sums + j, s);
    _mm256_storeu_pd(diffs + j, d);
  }
  for (; j < n_pairs; ++j) {
    const double left = in[2 * j];
    const double right = in[2 * j + 1];
    sums[j] = left + right;
    diffs[j] = right - left;
  }
}

}  // namespace monotest::simd::avx2
