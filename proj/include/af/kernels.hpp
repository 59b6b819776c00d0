#pragma once

namespace af::kern {

enum class Backend { kScalar = 0, kAvx2 = 1 };

/// Flat-pointer inner loops shared by the tensor ops. Matrices are row-major
/// with tight strides. All reductions accumulate in a fixed order so results
/// are independent of thread count for a given backend.
struct Ops {
  const char* name;

  // c[m,n] (+)= a[m,k] * b[k,n]
  void (*gemm)(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);
  // c[m,n] (+)= a[k,m]^T * b[k,n]
  void (*gemm_tn)(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);
  // c[m,n] (+)= a[m,k] * b[n,k]^T
  void (*gemm_nt)(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);

  void (*add)(int n, const float* a, const float* b, float* out);
  void (*sub)(int n, const float* a, const float* b, float* out);
  void (*mul)(int n, const float* a, const float* b, float* out);
  void (*axpy)(int n, float alpha, const float* x, float* y);
  void (*scale)(int n, float s, const float* x, float* out);
  void (*lrelu)(int n, float slope, const float* x, float* out);
  // out = g * (x > 0 ? 1 : slope)
  void (*lrelu_bwd)(int n, float slope, const float* x, const float* g, float* out);

  float (*dot)(int n, const float* a, const float* b);
  float (*sum)(int n, const float* x);
  float (*sumsq)(int n, const float* x);
};

const Ops& scalar_ops();
#if defined(AF_HAVE_AVX2)
const Ops& avx2_ops();
#endif

/// Active backend. Resolved once at startup: best supported backend, unless
/// the AVATARFORGE_KERNELS environment variable ("scalar" or "avx2") says
/// otherwise.
const Ops& ops();
Backend active();
bool supported(Backend b);
/// Force a backend (tests). Returns false if unsupported on this host.
bool set_active(Backend b);

}  // namespace af::kern
