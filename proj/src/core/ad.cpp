#include "af/ad.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

#include "af/kernels.hpp"

namespace af::ad {

namespace {

std::array<int, 4> pad4(const std::vector<int>& s) {
  std::array<int, 4> out = {1, 1, 1, 1};
  const int off = 4 - static_cast<int>(s.size());
  if (off < 0) throw std::invalid_argument("tensors above rank 4 unsupported");
  for (size_t i = 0; i < s.size(); ++i) out[off + i] = s[i];
  return out;
}

std::vector<int> broadcast_shape(const std::vector<int>& a, const std::vector<int>& b) {
  const auto pa = pad4(a), pb = pad4(b);
  std::array<int, 4> po{};
  for (int i = 0; i < 4; ++i) {
    if (pa[i] == pb[i] || pb[i] == 1)
      po[i] = pa[i];
    else if (pa[i] == 1)
      po[i] = pb[i];
    else
      throw std::invalid_argument("broadcast shape mismatch");
  }
  const int rank = std::max(a.size(), b.size());
  std::vector<int> out(po.end() - rank, po.end());
  if (rank == 0) out = {1};
  return out;
}

std::array<int64_t, 4> strides_for(const std::array<int, 4>& shape, const std::array<int, 4>& out) {
  std::array<int64_t, 4> st{};
  int64_t acc = 1;
  for (int i = 3; i >= 0; --i) {
    st[i] = (shape[i] == 1 && out[i] != 1) ? 0 : acc;
    acc *= shape[i];
  }
  return st;
}

template <class F>
Tensor bcast_binary(const Tensor& a, const Tensor& b, F&& f) {
  if (a.shape == b.shape) {
    Tensor out(a.shape);
    for (int64_t i = 0; i < a.numel(); ++i) out.v[i] = f(a.v[i], b.v[i]);
    return out;
  }
  const auto os = broadcast_shape(a.shape, b.shape);
  const auto o4 = pad4(os), a4 = pad4(a.shape), b4 = pad4(b.shape);
  const auto sa = strides_for(a4, o4), sb = strides_for(b4, o4);
  Tensor out(os);
  int64_t w = 0;
  for (int i0 = 0; i0 < o4[0]; ++i0)
    for (int i1 = 0; i1 < o4[1]; ++i1)
      for (int i2 = 0; i2 < o4[2]; ++i2) {
        const int64_t ba = i0 * sa[0] + i1 * sa[1] + i2 * sa[2];
        const int64_t bb = i0 * sb[0] + i1 * sb[1] + i2 * sb[2];
        for (int i3 = 0; i3 < o4[3]; ++i3)
          out.v[w++] = f(a.v[ba + i3 * sa[3]], b.v[bb + i3 * sb[3]]);
      }
  return out;
}

Tensor reduce_to_shape(const Tensor& x, const std::vector<int>& target) {
  if (x.shape == target) return x;
  const auto x4 = pad4(x.shape), t4 = pad4(target);
  for (int i = 0; i < 4; ++i)
    if (t4[i] != x4[i] && t4[i] != 1) throw std::invalid_argument("sum_to_shape not a reduction");
  Tensor out(target);
  const auto st = strides_for(t4, x4);  // target strides laid over x iteration
  int64_t r = 0;
  for (int i0 = 0; i0 < x4[0]; ++i0)
    for (int i1 = 0; i1 < x4[1]; ++i1)
      for (int i2 = 0; i2 < x4[2]; ++i2) {
        const int64_t bo = i0 * st[0] + i1 * st[1] + i2 * st[2];
        for (int i3 = 0; i3 < x4[3]; ++i3) out.v[bo + i3 * st[3]] += x.v[r++];
      }
  return out;
}

Tensor broadcast_tensor(const Tensor& x, const std::vector<int>& target) {
  if (x.shape == target) return x;
  const auto o4 = pad4(target), x4 = pad4(x.shape);
  const auto sx = strides_for(x4, o4);
  for (int i = 0; i < 4; ++i)
    if (x4[i] != o4[i] && x4[i] != 1) throw std::invalid_argument("broadcast_to shape mismatch");
  Tensor out(target);
  int64_t w = 0;
  for (int i0 = 0; i0 < o4[0]; ++i0)
    for (int i1 = 0; i1 < o4[1]; ++i1)
      for (int i2 = 0; i2 < o4[2]; ++i2) {
        const int64_t bx = i0 * sx[0] + i1 * sx[1] + i2 * sx[2];
        for (int i3 = 0; i3 < o4[3]; ++i3) out.v[w++] = x.v[bx + i3 * sx[3]];
      }
  return out;
}

using Vjp = std::function<std::vector<Var>(const Var&, const Var&)>;

Var make(Tensor val, const char* op, std::vector<Var> parents, Vjp vjp) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  n->op = op;
  bool ng = false;
  for (const auto& p : parents) ng = ng || (p && p->needs_grad);
  n->needs_grad = ng;
  if (ng) {
    n->parents = std::move(parents);
    n->vjp = std::move(vjp);
  }
  return n;
}

float stable_sigmoid(float x) {
  if (x >= 0.0f) return 1.0f / (1.0f + std::exp(-x));
  const float e = std::exp(x);
  return e / (1.0f + e);
}

}  // namespace

Var constant(Tensor t) {
  auto n = std::make_shared<Node>();
  n->val = std::move(t);
  n->op = "const";
  return n;
}

Var leaf(Tensor t) {
  auto n = std::make_shared<Node>();
  n->val = std::move(t);
  n->op = "leaf";
  n->needs_grad = true;
  return n;
}

Var add(const Var& a, const Var& b) {
  return make(bcast_binary(a->val, b->val, [](float x, float y) { return x + y; }), "add", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {sum_to_shape(g, self->parents[0]->val.shape),
                        sum_to_shape(g, self->parents[1]->val.shape)};
              });
}

Var sub(const Var& a, const Var& b) {
  return make(bcast_binary(a->val, b->val, [](float x, float y) { return x - y; }), "sub", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {sum_to_shape(g, self->parents[0]->val.shape),
                        neg(sum_to_shape(g, self->parents[1]->val.shape))};
              });
}

Var mul(const Var& a, const Var& b) {
  return make(bcast_binary(a->val, b->val, [](float x, float y) { return x * y; }), "mul", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {sum_to_shape(mul(g, self->parents[1]), self->parents[0]->val.shape),
                        sum_to_shape(mul(g, self->parents[0]), self->parents[1]->val.shape)};
              });
}

Var divv(const Var& a, const Var& b) {
  return make(bcast_binary(a->val, b->val, [](float x, float y) { return x / y; }), "div", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                const Var& a_ = self->parents[0];
                const Var& b_ = self->parents[1];
                return {sum_to_shape(divv(g, b_), a_->val.shape),
                        sum_to_shape(neg(divv(mul(g, a_), mul(b_, b_))), b_->val.shape)};
              });
}

Var neg(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = -x->val.v[i];
  return make(std::move(out), "neg", {x},
              [](const Var& g, const Var&) -> std::vector<Var> { return {neg(g)}; });
}

Var scale(const Var& x, float s) {
  Tensor out(x->val.shape);
  kern::ops().scale(static_cast<int>(out.numel()), s, x->val.data(), out.data());
  return make(std::move(out), "scale", {x},
              [s](const Var& g, const Var&) -> std::vector<Var> { return {scale(g, s)}; });
}

Var add_scalar(const Var& x, float s) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = x->val.v[i] + s;
  return make(std::move(out), "add_scalar", {x},
              [](const Var& g, const Var&) -> std::vector<Var> { return {g}; });
}

Var square(const Var& x) {
  Tensor out(x->val.shape);
  kern::ops().mul(static_cast<int>(out.numel()), x->val.data(), x->val.data(), out.data());
  return make(std::move(out), "square", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {mul(g, scale(self->parents[0], 2.0f))};
              });
}

Var sqrtv(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = std::sqrt(x->val.v[i]);
  return make(std::move(out), "sqrt", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {divv(scale(g, 0.5f), self)};
              });
}

Var expv(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = std::exp(x->val.v[i]);
  return make(std::move(out), "exp", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> { return {mul(g, self)}; });
}

Var logv(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = std::log(x->val.v[i]);
  return make(std::move(out), "log", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {divv(g, self->parents[0])};
              });
}

Var absv(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = std::fabs(x->val.v[i]);
  return make(std::move(out), "abs", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                const Tensor& xv = self->parents[0]->val;
                Tensor sgn(xv.shape);
                for (int64_t i = 0; i < xv.numel(); ++i)
                  sgn.v[i] = xv.v[i] > 0.0f ? 1.0f : (xv.v[i] < 0.0f ? -1.0f : 0.0f);
                return {mul(g, constant(std::move(sgn)))};
              });
}

Var sigmoid(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) out.v[i] = stable_sigmoid(x->val.v[i]);
  return make(std::move(out), "sigmoid", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                // g * s * (1 - s), differentiable through s
                return {mul(g, mul(self, add_scalar(neg(self), 1.0f)))};
              });
}

Var softplus(const Var& x) {
  Tensor out(x->val.shape);
  for (int64_t i = 0; i < out.numel(); ++i) {
    const float v = x->val.v[i];
    out.v[i] = std::max(v, 0.0f) + std::log1p(std::exp(-std::fabs(v)));
  }
  return make(std::move(out), "softplus", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {mul(g, sigmoid(self->parents[0]))};
              });
}

namespace {
// out = g * lrelu'(x); piecewise-constant in x, so only the g-path carries
// second-order gradients.
Var lrelu_bwd_apply(const Var& g, const Var& x, float slope) {
  Tensor out(g->val.shape);
  kern::ops().lrelu_bwd(static_cast<int>(out.numel()), slope, x->val.data(), g->val.data(),
                        out.data());
  return make(std::move(out), "lrelu_bwd", {g, x},
              [slope](const Var& gg, const Var& self) -> std::vector<Var> {
                return {lrelu_bwd_apply(gg, self->parents[1], slope), nullptr};
              });
}
}  // namespace

Var lrelu(const Var& x, float slope) {
  Tensor out(x->val.shape);
  kern::ops().lrelu(static_cast<int>(out.numel()), slope, x->val.data(), out.data());
  return make(std::move(out), "lrelu", {x},
              [slope](const Var& g, const Var& self) -> std::vector<Var> {
                return {lrelu_bwd_apply(g, self->parents[0], slope)};
              });
}

namespace {
void check2d(const Var& v, const char* who) {
  if (v->val.ndim() != 2) throw std::invalid_argument(std::string(who) + ": rank-2 tensor required");
}
}  // namespace

Var matmul(const Var& a, const Var& b) {
  check2d(a, "matmul");
  check2d(b, "matmul");
  const int m = a->val.dim(0), k = a->val.dim(1), n = b->val.dim(1);
  if (b->val.dim(0) != k) throw std::invalid_argument("matmul inner dim mismatch");
  Tensor out({m, n});
  kern::ops().gemm(m, n, k, a->val.data(), b->val.data(), out.data(), false);
  return make(std::move(out), "matmul", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {matmul_nt(g, self->parents[1]), matmul_tn(self->parents[0], g)};
              });
}

Var matmul_nt(const Var& a, const Var& b) {
  check2d(a, "matmul_nt");
  check2d(b, "matmul_nt");
  const int m = a->val.dim(0), k = a->val.dim(1), n = b->val.dim(0);
  if (b->val.dim(1) != k) throw std::invalid_argument("matmul_nt inner dim mismatch");
  Tensor out({m, n});
  kern::ops().gemm_nt(m, n, k, a->val.data(), b->val.data(), out.data(), false);
  return make(std::move(out), "matmul_nt", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {matmul(g, self->parents[1]), matmul_tn(g, self->parents[0])};
              });
}

Var matmul_tn(const Var& a, const Var& b) {
  check2d(a, "matmul_tn");
  check2d(b, "matmul_tn");
  const int k = a->val.dim(0), m = a->val.dim(1), n = b->val.dim(1);
  if (b->val.dim(0) != k) throw std::invalid_argument("matmul_tn inner dim mismatch");
  Tensor out({m, n});
  kern::ops().gemm_tn(m, n, k, a->val.data(), b->val.data(), out.data(), false);
  return make(std::move(out), "matmul_tn", {a, b},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {matmul_nt(self->parents[1], g), matmul(self->parents[0], g)};
              });
}

Var reshape(const Var& x, std::vector<int> shape) {
  Tensor out = x->val.reshaped(std::move(shape));
  return make(std::move(out), "reshape", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {reshape(g, self->parents[0]->val.shape)};
              });
}

Var permute(const Var& x, std::vector<int> perm) {
  const int r = x->val.ndim();
  if (static_cast<int>(perm.size()) != r) throw std::invalid_argument("permute rank mismatch");
  std::vector<int> oshape(r);
  for (int i = 0; i < r; ++i) oshape[i] = x->val.dim(perm[i]);
  // strides of x
  std::vector<int64_t> xstr(r, 1);
  for (int i = r - 2; i >= 0; --i) xstr[i] = xstr[i + 1] * x->val.dim(i + 1);
  Tensor out(oshape);
  std::vector<int> idx(r, 0);
  for (int64_t w = 0; w < out.numel(); ++w) {
    int64_t src = 0;
    for (int i = 0; i < r; ++i) src += static_cast<int64_t>(idx[i]) * xstr[perm[i]];
    out.v[w] = x->val.v[src];
    for (int i = r - 1; i >= 0; --i) {
      if (++idx[i] < oshape[i]) break;
      idx[i] = 0;
    }
  }
  std::vector<int> inv(r);
  for (int i = 0; i < r; ++i) inv[perm[i]] = i;
  return make(std::move(out), "permute", {x},
              [inv](const Var& g, const Var&) -> std::vector<Var> { return {permute(g, inv)}; });
}

namespace {
// zero tensor of original size with g placed in [start,start+len) along axis
Var slice_adjoint(const Var& g, int axis, int start, const std::vector<int>& orig_shape);
}  // namespace

Var slicev(const Var& x, int axis, int start, int len) {
  const int r = x->val.ndim();
  if (axis < 0 || axis >= r || start < 0 || start + len > x->val.dim(axis))
    throw std::invalid_argument("slice out of range");
  std::vector<int> oshape = x->val.shape;
  oshape[axis] = len;
  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= x->val.dim(i);
  for (int i = axis + 1; i < r; ++i) inner *= x->val.dim(i);
  Tensor out(oshape);
  const int d = x->val.dim(axis);
  for (int64_t o = 0; o < outer; ++o)
    std::memcpy(out.data() + o * len * inner, x->val.data() + (o * d + start) * inner,
                static_cast<size_t>(len) * inner * sizeof(float));
  return make(std::move(out), "slice", {x},
              [axis, start](const Var& g, const Var& self) -> std::vector<Var> {
                return {slice_adjoint(g, axis, start, self->parents[0]->val.shape)};
              });
}

namespace {
Var slice_adjoint(const Var& g, int axis, int start, const std::vector<int>& orig_shape) {
  const int r = static_cast<int>(orig_shape.size());
  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= orig_shape[i];
  for (int i = axis + 1; i < r; ++i) inner *= orig_shape[i];
  const int len = g->val.dim(axis);
  const int d = orig_shape[axis];
  Tensor out(orig_shape);
  for (int64_t o = 0; o < outer; ++o)
    std::memcpy(out.data() + (o * d + start) * inner, g->val.data() + o * len * inner,
                static_cast<size_t>(len) * inner * sizeof(float));
  return make(std::move(out), "slice_adj", {g},
              [axis, start, len](const Var& gg, const Var&) -> std::vector<Var> {
                return {slicev(gg, axis, start, len)};
              });
}
}  // namespace

Var concatv(const std::vector<Var>& xs, int axis) {
  if (xs.empty()) throw std::invalid_argument("concat of nothing");
  const int r = xs[0]->val.ndim();
  std::vector<int> oshape = xs[0]->val.shape;
  int total = 0;
  for (const auto& x : xs) total += x->val.dim(axis);
  oshape[axis] = total;
  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= oshape[i];
  for (int i = axis + 1; i < r; ++i) inner *= oshape[i];
  Tensor out(oshape);
  int off = 0;
  for (const auto& x : xs) {
    const int len = x->val.dim(axis);
    for (int64_t o = 0; o < outer; ++o)
      std::memcpy(out.data() + (o * total + off) * inner, x->val.data() + o * len * inner,
                  static_cast<size_t>(len) * inner * sizeof(float));
    off += len;
  }
  std::vector<int> lens;
  for (const auto& x : xs) lens.push_back(x->val.dim(axis));
  return make(std::move(out), "concat", {xs.begin(), xs.end()},
              [axis, lens](const Var& g, const Var&) -> std::vector<Var> {
                std::vector<Var> out;
                int start = 0;
                for (int len : lens) {
                  out.push_back(slicev(g, axis, start, len));
                  start += len;
                }
                return out;
              });
}

Var broadcast_to(const Var& x, std::vector<int> shape) {
  Tensor out = broadcast_tensor(x->val, shape);
  return make(std::move(out), "broadcast", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {sum_to_shape(g, self->parents[0]->val.shape)};
              });
}

Var sum_to_shape(const Var& x, std::vector<int> shape) {
  if (x->val.shape == shape) return x;
  Tensor out = reduce_to_shape(x->val, shape);
  return make(std::move(out), "sum_to", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {broadcast_to(g, self->parents[0]->val.shape)};
              });
}

Var sum_all(const Var& x) {
  Tensor out({1});
  out.v[0] = kern::ops().sum(static_cast<int>(x->val.numel()), x->val.data());
  return make(std::move(out), "sum_all", {x},
              [](const Var& g, const Var& self) -> std::vector<Var> {
                return {broadcast_to(g, self->parents[0]->val.shape)};
              });
}

Var mean_all(const Var& x) {
  return scale(sum_all(x), 1.0f / static_cast<float>(x->val.numel()));
}

Var sum_axis(const Var& x, int axis, bool keepdim) {
  std::vector<int> target = x->val.shape;
  target[axis] = 1;
  Var s = sum_to_shape(x, target);
  if (keepdim) return s;
  std::vector<int> dropped;
  for (int i = 0; i < x->val.ndim(); ++i)
    if (i != axis) dropped.push_back(x->val.dim(i));
  if (dropped.empty()) dropped = {1};
  return reshape(s, dropped);
}

Var mean_axis(const Var& x, int axis, bool keepdim) {
  return scale(sum_axis(x, axis, keepdim), 1.0f / static_cast<float>(x->val.dim(axis)));
}

Var softmax(const Var& x, int axis) {
  const int r = x->val.ndim();
  int64_t outer = 1, inner = 1;
  const int d = x->val.dim(axis);
  for (int i = 0; i < axis; ++i) outer *= x->val.dim(i);
  for (int i = axis + 1; i < r; ++i) inner *= x->val.dim(i);
  Tensor out(x->val.shape);
  for (int64_t o = 0; o < outer; ++o)
    for (int64_t in = 0; in < inner; ++in) {
      const float* src = x->val.data() + o * d * inner + in;
      float* dst = out.data() + o * d * inner + in;
      float mx = src[0];
      for (int j = 1; j < d; ++j) mx = std::max(mx, src[j * inner]);
      float z = 0.0f;
      for (int j = 0; j < d; ++j) {
        const float e = std::exp(src[j * inner] - mx);
        dst[j * inner] = e;
        z += e;
      }
      const float invz = 1.0f / z;
      for (int j = 0; j < d; ++j) dst[j * inner] *= invz;
    }
  return make(std::move(out), "softmax", {x},
              [axis](const Var& g, const Var& self) -> std::vector<Var> {
                Var gs = mul(g, self);
                return {sub(gs, mul(self, sum_axis(gs, axis, true)))};
              });
}

namespace {
Var scatter_rows(const Var& g, const std::vector<int>& idx, int n);
}  // namespace

Var pick(const Var& x, const std::vector<int>& idx) {
  check2d(x, "pick");
  const int m = x->val.dim(0), n = x->val.dim(1);
  if (static_cast<int>(idx.size()) != m) throw std::invalid_argument("pick index count mismatch");
  Tensor out({m});
  for (int i = 0; i < m; ++i) out.v[i] = x->val.v[static_cast<int64_t>(i) * n + idx[i]];
  return make(std::move(out), "pick", {x},
              [idx, n](const Var& g, const Var&) -> std::vector<Var> {
                return {scatter_rows(g, idx, n)};
              });
}

namespace {
Var scatter_rows(const Var& g, const std::vector<int>& idx, int n) {
  const int m = g->val.dim(0);
  Tensor out({m, n});
  for (int i = 0; i < m; ++i) out.v[static_cast<int64_t>(i) * n + idx[i]] = g->val.v[i];
  return make(std::move(out), "scatter_rows", {g},
              [idx](const Var& gg, const Var&) -> std::vector<Var> { return {pick(gg, idx)}; });
}
}  // namespace

Var detach(const Var& x) { return constant(x->val); }

Var Grads::of(const Var& x) const {
  auto it = by_node.find(x.get());
  return it == by_node.end() ? nullptr : it->second;
}

Tensor Grads::tensor_of(const Var& x) const {
  Var g = of(x);
  if (!g) return Tensor(x->val.shape);
  return g->val;
}

Grads backward(const Var& root) {
  if (root->val.numel() != 1) throw std::invalid_argument("backward root must be scalar");
  // post-order over needs_grad subgraph
  std::vector<Var> topo;
  std::unordered_set<const Node*> seen;
  struct Frame {
    Var n;
    size_t next = 0;
  };
  std::vector<Frame> stack;
  if (root->needs_grad) stack.push_back({root});
  seen.insert(root.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->parents.size()) {
      Var p = f.n->parents[f.next++];
      if (p && p->needs_grad && !seen.count(p.get())) {
        seen.insert(p.get());
        stack.push_back({p});
      }
    } else {
      topo.push_back(f.n);
      stack.pop_back();
    }
  }
  Grads gr;
  gr.by_node[root.get()] = constant(Tensor({1}, 1.0f));
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const Var& n = *it;
    auto git = gr.by_node.find(n.get());
    if (git == gr.by_node.end() || !n->vjp) continue;
    Var g = git->second;
    if (g->val.shape != n->val.shape) g = broadcast_to(g, n->val.shape);
    auto pgs = n->vjp(g, n);
    for (size_t i = 0; i < n->parents.size(); ++i) {
      const Var& p = n->parents[i];
      if (!p || !p->needs_grad || i >= pgs.size() || !pgs[i]) continue;
      auto& slot = gr.by_node[p.get()];
      slot = slot ? add(slot, pgs[i]) : pgs[i];
    }
  }
  return gr;
}

}  // namespace af::ad
