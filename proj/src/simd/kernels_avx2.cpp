// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "hipmdp/simd/kernels.hpp"

namespace hipmdp::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Four input rows share each load of a weight row.
void affine_rows_avx2(std::size_t rows, std::size_t out, std::size_t in, const double* x,
                      const double* w, const double* bias, double* y) {
  std::size_t b = 0;
  for (; b + 4 <= rows; b += 4) {
    const double* x0 = x + (b + 0) * in;
    const double* x1 = x + (b + 1) * in;
    const double* x2 = x + (b + 2) * in;
    const double* x3 = x + (b + 3) * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w + o * in;
      __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
      std::size_t i = 0;
      for (; i + 4 <= in; i += 4) {
        const __m256d wv = _mm256_loadu_pd(wo + i);
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x0 + i), wv, a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x1 + i), wv, a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x2 + i), wv, a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x3 + i), wv, a3);
      }
      double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
      for (; i < in; ++i) {
        s0 += x0[i] * wo[i];
        s1 += x1[i] * wo[i];
        s2 += x2[i] * wo[i];
        s3 += x3[i] * wo[i];
      }
      y[(b + 0) * out + o] = bias[o] + s0;
      y[(b + 1) * out + o] = bias[o] + s1;
      y[(b + 2) * out + o] = bias[o] + s2;
      y[(b + 3) * out + o] = bias[o] + s3;
    }
  }
  for (; b < rows; ++b) {
    const double* xb = x + b * in;
    for (std::size_t o = 0; o < out; ++o) y[b * out + o] = bias[o] + dot_avx2(w + o * in, xb, in);
  }
}

void accumulate_input_grad_avx2(std::size_t rows, std::size_t out, std::size_t in, const double* g,
                                const double* w, double* gx) {
  for (std::size_t b = 0; b < rows; ++b) {
    for (std::size_t o = 0; o < out; ++o) {
      const double go = g[b * out + o];
      if (go != 0.0) axpy_avx2(go, w + o * in, gx + b * in, in);
    }
  }
}

void accumulate_weight_grad_avx2(std::size_t rows, std::size_t out, std::size_t in, const double* g,
                                 const double* x, double* gw) {
  for (std::size_t o = 0; o < out; ++o) {
    for (std::size_t b = 0; b < rows; ++b) {
      const double go = g[b * out + o];
      if (go != 0.0) axpy_avx2(go, x + b * in, gw + o * in, in);
    }
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",
                                 &dot_avx2,
                                 &axpy_avx2,
                                 &affine_rows_avx2,
                                 &accumulate_input_grad_avx2,
                                 &accumulate_weight_grad_avx2};
  return table;
}

}  // namespace hipmdp::simd
