#include "af/kernels.hpp"

#if defined(AF_HAVE_AVX2)

#include <immintrin.h>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace af::kern {
namespace {

// Row kernel: c_row (+)= sum_p coeff(p) * b[p,:]. Broadcast the scalar,
// FMA across the row in 32-float strips. Per-element accumulation order is
// p-major, matching the scalar reference.
inline void row_axpy_accum(int n, int k, const float* coeffs, int coeff_stride, const float* b,
                           float* crow, bool accumulate) {
  if (!accumulate)
    for (int j = 0; j < n; ++j) crow[j] = 0.0f;
  int j = 0;
  for (; j + 32 <= n; j += 32) {
    __m256 c0 = _mm256_loadu_ps(crow + j);
    __m256 c1 = _mm256_loadu_ps(crow + j + 8);
    __m256 c2 = _mm256_loadu_ps(crow + j + 16);
    __m256 c3 = _mm256_loadu_ps(crow + j + 24);
    for (int p = 0; p < k; ++p) {
      const __m256 av = _mm256_set1_ps(coeffs[static_cast<long>(p) * coeff_stride]);
      const float* brow = b + static_cast<long>(p) * n + j;
      c0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow), c0);
      c1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 8), c1);
      c2 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 16), c2);
      c3 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 24), c3);
    }
    _mm256_storeu_ps(crow + j, c0);
    _mm256_storeu_ps(crow + j + 8, c1);
    _mm256_storeu_ps(crow + j + 16, c2);
    _mm256_storeu_ps(crow + j + 24, c3);
  }
  for (; j + 8 <= n; j += 8) {
    __m256 c0 = _mm256_loadu_ps(crow + j);
    for (int p = 0; p < k; ++p) {
      const __m256 av = _mm256_set1_ps(coeffs[static_cast<long>(p) * coeff_stride]);
      c0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b + static_cast<long>(p) * n + j), c0);
    }
    _mm256_storeu_ps(crow + j, c0);
  }
  for (; j < n; ++j) {
    float acc = crow[j];
    for (int p = 0; p < k; ++p) acc += coeffs[static_cast<long>(p) * coeff_stride] * b[static_cast<long>(p) * n + j];
    crow[j] = acc;
  }
}

void v_gemm(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
#pragma omp parallel for schedule(static) if (m >= 4)
  for (int i = 0; i < m; ++i)
    row_axpy_accum(n, k, a + static_cast<long>(i) * k, 1, b, c + static_cast<long>(i) * n, accumulate);
}

void v_gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
#pragma omp parallel for schedule(static) if (m >= 4)
  for (int i = 0; i < m; ++i)
    row_axpy_accum(n, k, a + i, m, b, c + static_cast<long>(i) * n, accumulate);
}

inline float hsum8(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  return _mm_cvtss_f32(lo);
}

inline float dot_impl(int n, const float* a, const float* b) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  __m256 acc2 = _mm256_setzero_ps();
  __m256 acc3 = _mm256_setzero_ps();
  int i = 0;
  for (; i + 32 <= n; i += 32) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    acc2 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 16), _mm256_loadu_ps(b + i + 16), acc2);
    acc3 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 24), _mm256_loadu_ps(b + i + 24), acc3);
  }
  for (; i + 8 <= n; i += 8)
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  float acc = hsum8(_mm256_add_ps(_mm256_add_ps(acc0, acc1), _mm256_add_ps(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void v_gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
#pragma omp parallel for schedule(static) if (m >= 4)
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<long>(i) * k;
    float* crow = c + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) {
      const float d = dot_impl(k, arow, b + static_cast<long>(j) * k);
      crow[j] = accumulate ? crow[j] + d : d;
    }
  }
}

void v_add(int n, const float* a, const float* b, float* out) {
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}
void v_sub(int n, const float* a, const float* b, float* out) {
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}
void v_mul(int n, const float* a, const float* b, float* out) {
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}
void v_axpy(int n, float alpha, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(alpha);
  int i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}
void v_scale(int n, float s, const float* x, float* out) {
  const __m256 sv = _mm256_set1_ps(s);
  int i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(out + i, _mm256_mul_ps(sv, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) out[i] = s * x[i];
}
void v_lrelu(int n, float slope, const float* x, float* out) {
  const __m256 sv = _mm256_set1_ps(slope);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    _mm256_storeu_ps(out + i, _mm256_max_ps(xv, _mm256_mul_ps(sv, xv)));
  }
  for (; i < n; ++i) {
    const float sx = slope * x[i];
    out[i] = x[i] > sx ? x[i] : sx;
  }
}
void v_lrelu_bwd(int n, float slope, const float* x, const float* g, float* out) {
  const __m256 sv = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    const __m256 gv = _mm256_loadu_ps(g + i);
    const __m256 mask = _mm256_cmp_ps(xv, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(out + i, _mm256_blendv_ps(_mm256_mul_ps(sv, gv), gv, mask));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0f ? g[i] : slope * g[i];
}

float v_dot(int n, const float* a, const float* b) { return dot_impl(n, a, b); }

inline double hsum4d(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// double accumulation, as in the scalar reference
float v_sum(int n, const float* x) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(xv)));
    acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(xv, 1)));
  }
  double s = hsum4d(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return static_cast<float>(s);
}
float v_sumsq(int n, const float* x) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xv = _mm256_loadu_ps(x + i);
    const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(xv));
    const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(xv, 1));
    acc0 = _mm256_fmadd_pd(lo, lo, acc0);
    acc1 = _mm256_fmadd_pd(hi, hi, acc1);
  }
  double s = hsum4d(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += static_cast<double>(x[i]) * x[i];
  return static_cast<float>(s);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops k = {"avx2",  v_gemm,   v_gemm_tn, v_gemm_nt, v_add, v_sub,
                        v_mul,   v_axpy,   v_scale,   v_lrelu,   v_lrelu_bwd,
                        v_dot,   v_sum,    v_sumsq};
  return k;
}

}  // namespace af::kern

#endif  // AF_HAVE_AVX2
