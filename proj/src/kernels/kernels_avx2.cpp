// Compiled with -mavx2 -mfma; only entered after a runtime CPU check.

#include <immintrin.h>

#include "hfrac/kernels.hpp"

namespace hfrac::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void gather_differences_avx2(const double* u, const int* lo, const int* hi,
                             const double* offset, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m128i ilo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(lo + k));
    const __m128i ihi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(hi + k));
    __m256d d = _mm256_sub_pd(_mm256_i32gather_pd(u, ihi, 8), _mm256_i32gather_pd(u, ilo, 8));
    if (offset) d = _mm256_add_pd(d, _mm256_loadu_pd(offset + k));
    _mm256_storeu_pd(out + k, d);
  }
  for (; k < n; ++k) out[k] = u[hi[k]] - u[lo[k]] + (offset ? offset[k] : 0.0);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

double weighted_sum_squares_avx2(const double* w, const double* d, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dv = _mm256_loadu_pd(d + k);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + k), dv), dv, acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += w[k] * d[k] * d[k];
  return s;
}

double weighted_cross_avx2(const double* w, const double* d, const double* e,
                           std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d wd = _mm256_mul_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(d + k));
    acc = _mm256_fmadd_pd(wd, _mm256_loadu_pd(e + k), acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += w[k] * d[k] * e[k];
  return s;
}

void scaled_product_avx2(double s, const double* w, const double* d, double* out,
                         std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d sw = _mm256_mul_pd(sv, _mm256_loadu_pd(w + k));
    _mm256_storeu_pd(out + k, _mm256_mul_pd(sw, _mm256_loadu_pd(d + k)));
  }
  for (; k < n; ++k) out[k] = s * w[k] * d[k];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{gather_differences_avx2, dot_avx2, weighted_sum_squares_avx2,
                             weighted_cross_avx2,     scaled_product_avx2, axpy_avx2};
  return t;
}

}  // namespace hfrac::kernels
