#include <cmath>
#include <vector>

#include "af/ad.hpp"
#include "af/rng.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using af::Rng;
using af::Tensor;
using namespace af::ad;
using aftest::gradcheck;

namespace {
Tensor randn(Rng& rng, std::vector<int> shape, float scl = 1.0f) {
  Tensor t(std::move(shape));
  for (auto& x : t.v) x = scl * rng.normalf();
  return t;
}
}  // namespace

TEST_CASE("broadcast add/mul forward values") {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b({3}, {10, 20, 30});
  Var s = add(constant(a), constant(b));
  CHECK(s->val.v == std::vector<float>{11, 22, 33, 14, 25, 36});
  Var m = mul(constant(a), constant(Tensor({2, 1}, {2, -1})));
  CHECK(m->val.v == std::vector<float>{2, 4, 6, -4, -5, -6});
}

TEST_CASE("sum_to_shape is the adjoint reduction") {
  Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  Var r = sum_to_shape(constant(x), {3});
  CHECK(r->val.v == std::vector<float>{5, 7, 9});
  Var r2 = sum_to_shape(constant(x), {2, 1});
  CHECK(r2->val.v == std::vector<float>{6, 15});
}

TEST_CASE("softmax rows sum to one and vjp is correct") {
  Rng rng(5);
  Tensor x = randn(rng, {4, 7});
  Var s = softmax(constant(x), 1);
  for (int i = 0; i < 4; ++i) {
    float acc = 0;
    for (int j = 0; j < 7; ++j) acc += s->val.at({i, j});
    CHECK(std::fabs(acc - 1.0f) < 1e-6f);
  }
  const double err = gradcheck(
      [](const std::vector<Var>& in) {
        return sum_all(mul(softmax(in[0], 1), in[1]));
      },
      {randn(rng, {3, 5}), randn(rng, {3, 5})}, 17);
  CHECK(err < 1e-3);
}

TEST_CASE("elementwise and matmul gradients match finite differences") {
  Rng rng(11);
  const double err1 = gradcheck(
      [](const std::vector<Var>& in) {
        Var h = mul(sigmoid(in[0]), softplus(in[1]));
        h = add(h, divv(in[0], add_scalar(square(in[1]), 2.0f)));
        return mean_all(mul(h, h));
      },
      {randn(rng, {3, 4}), randn(rng, {3, 4})}, 21);
  CHECK(err1 < 1e-3);

  const double err2 = gradcheck(
      [](const std::vector<Var>& in) {
        return mean_all(lrelu(matmul(in[0], in[1]), 0.2f));
      },
      {randn(rng, {4, 6}), randn(rng, {6, 5})}, 22);
  CHECK(err2 < 1e-3);

  const double err3 = gradcheck(
      [](const std::vector<Var>& in) {
        Var a = matmul_nt(in[0], in[1]);  // [3,4]x[5,4]^T
        Var b = matmul_tn(in[2], a);      // [3,2]^T x [3,5]
        return sum_all(square(b));
      },
      {randn(rng, {3, 4}), randn(rng, {5, 4}), randn(rng, {3, 2})}, 23);
  CHECK(err3 < 1e-3);
}

TEST_CASE("reduction, slice, concat, permute, pick gradients") {
  Rng rng(13);
  const double err = gradcheck(
      [](const std::vector<Var>& in) {
        Var c = concatv({slicev(in[0], 1, 0, 2), slicev(in[0], 1, 1, 2)}, 1);
        Var p = permute(c, {1, 0});
        Var s = sum_axis(square(p), 0, false);
        return mean_all(mul(s, s));
      },
      {randn(rng, {3, 4})}, 31);
  CHECK(err < 1e-3);

  const double err2 = gradcheck(
      [](const std::vector<Var>& in) {
        return sum_all(square(pick(in[0], {2, 0, 1})));
      },
      {randn(rng, {3, 4})}, 32);
  CHECK(err2 < 1e-3);
}

TEST_CASE("conv2d family gradients match finite differences") {
  Rng rng(41);
  for (int stride : {1, 2}) {
    const double err = gradcheck(
        [stride](const std::vector<Var>& in) {
          Var y = conv2d(in[0], in[1], stride, 1);
          return scale(sum_all(square(lrelu(y, 0.2f))), 0.1f);
        },
        {randn(rng, {2, 3, 8, 8}), randn(rng, {4, 3, 3, 3}, 0.5f)}, 50 + stride, 0.05);
    CHECK(err < 1e-3);
  }
}

TEST_CASE("upsample2x is bilinear with an exact adjoint") {
  Rng rng(43);
  Tensor x = randn(rng, {1, 1, 4, 4});
  Var up = upsample2x(constant(x));
  CHECK(up->val.shape == std::vector<int>{1, 1, 8, 8});
  // corners are replicated under half-pixel alignment
  CHECK(up->val.at({0, 0, 0, 0}) == x.at({0, 0, 0, 0}));

  // adjoint identity via the generic directional check
  Tensor y = randn(rng, {1, 1, 8, 8});
  const double err = gradcheck(
      [&y](const std::vector<Var>& in) {
        return sum_all(mul(upsample2x(in[0]), constant(y)));
      },
      {x}, 61);
  CHECK(err < 1e-3);
}

TEST_CASE("double backprop: grad-of-grad of a quadratic is exact") {
  // f(x) = sum(x^3); df/dx = 3x^2; sum(df/dx) differentiated again = 6x
  Tensor x0({3}, {1.0f, -2.0f, 0.5f});
  Var x = leaf(x0);
  Var f = sum_all(mul(mul(x, x), x));
  Grads g1 = backward(f);
  Var gx = g1.of(x);
  REQUIRE(gx);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(gx->val.v[i] - 3 * x0.v[i] * x0.v[i]) < 1e-5f);
  Var g_sum = sum_all(gx);
  Grads g2 = backward(g_sum);
  Tensor ggx = g2.tensor_of(x);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(ggx.v[i] - 6 * x0.v[i]) < 1e-4f);
}

TEST_CASE("double backprop through matmul and lrelu composition") {
  // r1-style: loss = || d (sum sigmoid(x W)) / dx ||^2, check d loss / d W
  Rng rng(71);
  const double err = gradcheck(
      [](const std::vector<Var>& in) {
        Var x = in[1];
        Var out = sum_all(sigmoid(matmul(x, in[0])));
        Grads g = backward(out);
        Var gx = g.of(x);
        return sum_all(square(gx));
      },
      {randn(rng, {4, 3}), randn(rng, {2, 4})}, 72);
  CHECK(err < 2e-3);
}

TEST_CASE("detach blocks gradients") {
  Tensor x0({2}, {1.0f, 2.0f});
  Var x = leaf(x0);
  Var y = sum_all(mul(detach(x), x));  // d/dx = detached value
  Grads g = backward(y);
  Tensor gx = g.tensor_of(x);
  CHECK(gx.v == std::vector<float>{1.0f, 2.0f});
}
