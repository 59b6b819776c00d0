#include "af/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace af::kern {
namespace {

bool host_has_avx2() {
#if defined(AF_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend resolve_default() {
  if (const char* env = std::getenv("AVATARFORGE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0 && host_has_avx2()) return Backend::kAvx2;
  }
  return host_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

Backend& active_slot() {
  static Backend b = resolve_default();
  return b;
}

}  // namespace

bool supported(Backend b) {
  switch (b) {
    case Backend::kScalar: return true;
    case Backend::kAvx2: return host_has_avx2();
  }
  return false;
}

Backend active() { return active_slot(); }

bool set_active(Backend b) {
  if (!supported(b)) return false;
  active_slot() = b;
  return true;
}

const Ops& ops() {
#if defined(AF_HAVE_AVX2)
  if (active_slot() == Backend::kAvx2) return avx2_ops();
#endif
  return scalar_ops();
}

}  // namespace af::kern
