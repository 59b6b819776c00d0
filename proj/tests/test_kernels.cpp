#include <cmath>
#include <string>
#include <vector>

#include "af/kernels.hpp"
#include "af/rng.hpp"
#include "doctest.h"

using af::Rng;
namespace kern = af::kern;

namespace {

std::vector<float> randvec(Rng& rng, int n, float scl = 1.0f) {
  std::vector<float> v(static_cast<size_t>(n));
  for (auto& x : v) x = scl * rng.normalf();
  return v;
}

// error relative to the operand magnitudes; near-zero results from
// cancellation are judged against the problem scale, not themselves
float rel_err(float a, float b, float scale = 1.0f) {
  const float d = std::fabs(a - b);
  return d / std::max({scale, std::fabs(a), std::fabs(b)});
}

// Every backend must agree with the scalar reference: exactly for single-op
// elementwise kernels, within reassociation tolerance for reductions.
void check_backend(const kern::Ops& simd) {
  const kern::Ops& ref = kern::scalar_ops();
  Rng rng(1234);
  // sizes cover vector strips plus ragged remainders
  for (int n : {1, 7, 8, 9, 31, 32, 33, 100, 1000, 4097}) {
    auto a = randvec(rng, n), b = randvec(rng, n);
    std::vector<float> o1(a.size()), o2(a.size());

    ref.add(n, a.data(), b.data(), o1.data());
    simd.add(n, a.data(), b.data(), o2.data());
    CHECK(o1 == o2);

    ref.sub(n, a.data(), b.data(), o1.data());
    simd.sub(n, a.data(), b.data(), o2.data());
    CHECK(o1 == o2);

    ref.mul(n, a.data(), b.data(), o1.data());
    simd.mul(n, a.data(), b.data(), o2.data());
    CHECK(o1 == o2);

    ref.scale(n, 1.7f, a.data(), o1.data());
    simd.scale(n, 1.7f, a.data(), o2.data());
    CHECK(o1 == o2);

    ref.lrelu(n, 0.2f, a.data(), o1.data());
    simd.lrelu(n, 0.2f, a.data(), o2.data());
    CHECK(o1 == o2);

    ref.lrelu_bwd(n, 0.2f, a.data(), b.data(), o1.data());
    simd.lrelu_bwd(n, 0.2f, a.data(), b.data(), o2.data());
    CHECK(o1 == o2);

    CHECK(rel_err(ref.dot(n, a.data(), b.data()), simd.dot(n, a.data(), b.data())) < 1e-4f);
    CHECK(rel_err(ref.sum(n, a.data()), simd.sum(n, a.data())) < 2e-4f);
    CHECK(rel_err(ref.sumsq(n, a.data()), simd.sumsq(n, a.data())) < 1e-4f);
  }
}

void check_gemms(const kern::Ops& simd) {
  const kern::Ops& ref = kern::scalar_ops();
  Rng rng(99);
  struct Case {
    int m, n, k;
  };
  for (const Case c : {Case{1, 1, 1}, Case{3, 5, 7}, Case{16, 33, 27}, Case{64, 100, 65},
                       Case{2, 4096, 22}, Case{17, 129, 40}}) {
    auto a = randvec(rng, c.m * c.k);
    auto b = randvec(rng, c.k * c.n);
    auto at = randvec(rng, c.k * c.m);
    auto bt = randvec(rng, c.n * c.k);
    std::vector<float> c1(static_cast<size_t>(c.m) * c.n, 0.5f), c2 = c1;

    const float scl = std::sqrt(static_cast<float>(c.k));
    for (bool acc : {false, true}) {
      ref.gemm(c.m, c.n, c.k, a.data(), b.data(), c1.data(), acc);
      simd.gemm(c.m, c.n, c.k, a.data(), b.data(), c2.data(), acc);
      for (size_t i = 0; i < c1.size(); ++i) CHECK(rel_err(c1[i], c2[i], scl) < 1e-4f);

      ref.gemm_tn(c.m, c.n, c.k, at.data(), b.data(), c1.data(), acc);
      simd.gemm_tn(c.m, c.n, c.k, at.data(), b.data(), c2.data(), acc);
      for (size_t i = 0; i < c1.size(); ++i) CHECK(rel_err(c1[i], c2[i], scl) < 1e-4f);

      ref.gemm_nt(c.m, c.n, c.k, a.data(), bt.data(), c1.data(), acc);
      simd.gemm_nt(c.m, c.n, c.k, a.data(), bt.data(), c2.data(), acc);
      for (size_t i = 0; i < c1.size(); ++i) CHECK(rel_err(c1[i], c2[i], scl) < 1e-4f);
    }
  }
}

}  // namespace

TEST_CASE("scalar gemm matches a naive triple loop") {
  const kern::Ops& ref = kern::scalar_ops();
  Rng rng(7);
  const int m = 5, n = 9, k = 6;
  auto a = randvec(rng, m * k);
  auto b = randvec(rng, k * n);
  std::vector<float> c(static_cast<size_t>(m) * n);
  ref.gemm(m, n, k, a.data(), b.data(), c.data(), false);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (int p = 0; p < k; ++p) acc += static_cast<double>(a[i * k + p]) * b[p * n + j];
      CHECK(std::fabs(acc - c[static_cast<size_t>(i) * n + j]) < 1e-4);
    }
}

#if defined(AF_HAVE_AVX2)
TEST_CASE("avx2 backend is equivalent to the scalar reference") {
  if (!kern::supported(kern::Backend::kAvx2)) {
    MESSAGE("avx2 not supported on this host, skipping");
    return;
  }
  check_backend(kern::avx2_ops());
  check_gemms(kern::avx2_ops());
}
#endif

TEST_CASE("backend selection is overridable") {
  const kern::Backend prev = kern::active();
  CHECK(kern::set_active(kern::Backend::kScalar));
  CHECK(kern::active() == kern::Backend::kScalar);
  CHECK(std::string(kern::ops().name) == "scalar");
  kern::set_active(prev);
}
