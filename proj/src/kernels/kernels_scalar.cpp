#include "af/kernels.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

// Reference backend. Loop order and accumulation order define the semantics
// the SIMD backends are tested against: every c[i,j] is a k-ordered sum.

namespace af::kern {
namespace {

void s_gemm(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
#pragma omp parallel for schedule(static) if (m >= 4)
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<long>(i) * n;
    if (!accumulate)
      for (int j = 0; j < n; ++j) crow[j] = 0.0f;
    const float* arow = a + static_cast<long>(i) * k;
    for (int p = 0; p < k; ++p) {
      const float av = arow[p];
      if (av == 0.0f) continue;
      const float* brow = b + static_cast<long>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void s_gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
#pragma omp parallel for schedule(static) if (m >= 4)
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<long>(i) * n;
    if (!accumulate)
      for (int j = 0; j < n; ++j) crow[j] = 0.0f;
    for (int p = 0; p < k; ++p) {
      const float av = a[static_cast<long>(p) * m + i];
      if (av == 0.0f) continue;
      const float* brow = b + static_cast<long>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void s_gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
#pragma omp parallel for schedule(static) if (m >= 4)
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<long>(i) * k;
    float* crow = c + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) {
      const float* brow = b + static_cast<long>(j) * k;
      float acc = 0.0f;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

void s_add(int n, const float* a, const float* b, float* out) {
  for (int i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void s_sub(int n, const float* a, const float* b, float* out) {
  for (int i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void s_mul(int n, const float* a, const float* b, float* out) {
  for (int i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void s_axpy(int n, float alpha, const float* x, float* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}
void s_scale(int n, float s, const float* x, float* out) {
  for (int i = 0; i < n; ++i) out[i] = s * x[i];
}
void s_lrelu(int n, float slope, const float* x, float* out) {
  for (int i = 0; i < n; ++i) {
    const float sx = slope * x[i];
    out[i] = x[i] > sx ? x[i] : sx;
  }
}
void s_lrelu_bwd(int n, float slope, const float* x, const float* g, float* out) {
  for (int i = 0; i < n; ++i) out[i] = x[i] > 0.0f ? g[i] : slope * g[i];
}

float s_dot(int n, const float* a, const float* b) {
  float acc = 0.0f;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}
// full reductions accumulate in double: they feed scalar losses, where fp32
// accumulation noise would swamp finite-difference checks
float s_sum(int n, const float* x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i];
  return static_cast<float>(acc);
}
float s_sumsq(int n, const float* x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += static_cast<double>(x[i]) * x[i];
  return static_cast<float>(acc);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops k = {"scalar", s_gemm,   s_gemm_tn, s_gemm_nt, s_add, s_sub,
                        s_mul,    s_axpy,   s_scale,   s_lrelu,   s_lrelu_bwd,
                        s_dot,    s_sum,    s_sumsq};
  return k;
}

}  // namespace af::kern
