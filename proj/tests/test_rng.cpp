#include <cmath>
#include <vector>

#include "af/rng.hpp"
#include "doctest.h"

using af::Rng;

TEST_CASE("rng streams are deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(43);
  bool differ = false;
  for (int i = 0; i < 10; ++i) differ = differ || (c.next_u64() != d.next_u64());
  CHECK(differ);
}

TEST_CASE("uniform and normal have sane moments") {
  Rng rng(7);
  double su = 0, su2 = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::fabs(su / n - 0.5) < 0.005);
  CHECK(std::fabs(su2 / n - 1.0 / 3.0) < 0.005);
  CHECK(std::fabs(sn / n) < 0.01);
  CHECK(std::fabs(sn2 / n - 1.0) < 0.02);
}

TEST_CASE("fork gives independent reproducible substreams") {
  Rng base(1000);
  Rng f1 = base.fork(3);
  // consuming the parent must not change what a fork produces
  base.next_u64();
  base.next_u64();
  Rng f2 = base.fork(3);
  for (int i = 0; i < 20; ++i) CHECK(f1.next_u64() == f2.next_u64());
  Rng g = base.fork(4);
  bool differ = false;
  Rng f3 = base.fork(3);
  for (int i = 0; i < 10; ++i) differ = differ || (g.next_u64() != f3.next_u64());
  CHECK(differ);
}

TEST_CASE("uniform_int is within range and roughly uniform") {
  Rng rng(55);
  std::vector<int> counts(9, 0);
  const int n = 90000;
  for (int i = 0; i < n; ++i) {
    const int k = rng.uniform_int(9);
    REQUIRE(k >= 0);
    REQUIRE(k < 9);
    counts[static_cast<size_t>(k)]++;
  }
  for (int c : counts) CHECK(std::fabs(c / static_cast<double>(n) - 1.0 / 9) < 0.01);
}
