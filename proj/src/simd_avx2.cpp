// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here runs unless CPUID reports both features (see simd_dispatch).

#include "heatsift/simd.hpp"

#if HEATSIFT_HAVE_AVX2

#include <immintrin.h>

namespace heatsift::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sumsq(const double* x, std::size_t n) { return dot(x, x, n); }

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void scal_sub(double a, const double* w, const double* v, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmsub_pd(av, _mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * w[i] - v[i];
}

void cheb_step(double a, const double* w, const double* y1, const double* y0, double* out,
               std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmsub_pd(av, _mm256_loadu_pd(w + i), _mm256_loadu_pd(y0 + i));
    r = _mm256_fnmadd_pd(two, _mm256_loadu_pd(y1 + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * w[i] - 2.0 * y1[i] - y0[i];
}

void add_scaled_sq(double a, const double* x, double* acc, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    __m256d r = _mm256_fmadd_pd(_mm256_mul_pd(av, xv), xv, _mm256_loadu_pd(acc + i));
    _mm256_storeu_pd(acc + i, r);
  }
  for (; i < n; ++i) acc[i] += a * x[i] * x[i];
}

void spmv(const CsrView& m, const double* x, double* y) {
  for (std::size_t i = 0; i < m.n; ++i) {
    const std::int64_t begin = m.row_ptr[i];
    const std::int64_t end = m.row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    std::int64_t k = begin;
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(m.col + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(m.val + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += m.val[k] * x[m.col[k]];
    y[i] = s;
  }
}

}  // namespace heatsift::simd::avx2

#endif  // HEATSIFT_HAVE_AVX2
