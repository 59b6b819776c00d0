#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "af/ad.hpp"
#include "af/kernels.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

// conv2d and its two gradient primitives form a closed family under
// differentiation, which is what makes penalties-on-gradients trainable.

namespace af::ad {

namespace {

int out_dim(int in, int k, int stride, int pad) { return (in + 2 * pad - k) / stride + 1; }

void im2col(const float* x, int ci, int h, int w, int k, int stride, int pad, float* col) {
  const int ho = out_dim(h, k, stride, pad), wo = out_dim(w, k, stride, pad);
  const int hw = ho * wo;
  for (int c = 0; c < ci; ++c) {
    const float* plane = x + static_cast<int64_t>(c) * h * w;
    for (int ki = 0; ki < k; ++ki)
      for (int kj = 0; kj < k; ++kj) {
        float* dst = col + static_cast<int64_t>((c * k + ki) * k + kj) * hw;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * stride + ki - pad;
          if (ih < 0 || ih >= h) {
            std::memset(dst + oh * wo, 0, sizeof(float) * wo);
            continue;
          }
          const float* srow = plane + static_cast<int64_t>(ih) * w;
          for (int ow = 0; ow < wo; ++ow) {
            const int iw = ow * stride + kj - pad;
            dst[oh * wo + ow] = (iw < 0 || iw >= w) ? 0.0f : srow[iw];
          }
        }
      }
  }
}

void col2im_add(const float* col, int ci, int h, int w, int k, int stride, int pad, float* x) {
  const int ho = out_dim(h, k, stride, pad), wo = out_dim(w, k, stride, pad);
  const int hw = ho * wo;
  for (int c = 0; c < ci; ++c) {
    float* plane = x + static_cast<int64_t>(c) * h * w;
    for (int ki = 0; ki < k; ++ki)
      for (int kj = 0; kj < k; ++kj) {
        const float* src = col + static_cast<int64_t>((c * k + ki) * k + kj) * hw;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * stride + ki - pad;
          if (ih < 0 || ih >= h) continue;
          float* drow = plane + static_cast<int64_t>(ih) * w;
          for (int ow = 0; ow < wo; ++ow) {
            const int iw = ow * stride + kj - pad;
            if (iw >= 0 && iw < w) drow[iw] += src[oh * wo + ow];
          }
        }
      }
  }
}

struct ConvDims {
  int b, ci, h, w, co, k, stride, pad, ho, wo;
};

ConvDims conv_dims(const Tensor& x, const Tensor& wt, int stride, int pad) {
  if (x.ndim() != 4 || wt.ndim() != 4) throw std::invalid_argument("conv2d: NCHW and OIHW required");
  ConvDims d{};
  d.b = x.dim(0);
  d.ci = x.dim(1);
  d.h = x.dim(2);
  d.w = x.dim(3);
  d.co = wt.dim(0);
  d.k = wt.dim(2);
  if (wt.dim(1) != d.ci || wt.dim(3) != d.k)
    throw std::invalid_argument("conv2d: weight shape mismatch");
  d.stride = stride;
  d.pad = pad;
  d.ho = out_dim(d.h, d.k, stride, pad);
  d.wo = out_dim(d.w, d.k, stride, pad);
  return d;
}

Tensor conv_forward(const Tensor& x, const Tensor& wt, int stride, int pad) {
  const ConvDims d = conv_dims(x, wt, stride, pad);
  const int kk = d.ci * d.k * d.k, hw = d.ho * d.wo;
  Tensor out({d.b, d.co, d.ho, d.wo});
#pragma omp parallel for schedule(static)
  for (int b = 0; b < d.b; ++b) {
    std::vector<float> col(static_cast<size_t>(kk) * hw);
    im2col(x.data() + static_cast<int64_t>(b) * d.ci * d.h * d.w, d.ci, d.h, d.w, d.k, d.stride,
           d.pad, col.data());
    kern::ops().gemm(d.co, hw, kk, wt.data(), col.data(),
                     out.data() + static_cast<int64_t>(b) * d.co * hw, false);
  }
  return out;
}

Tensor conv_igrad_tensor(const Tensor& gy, const Tensor& wt, int stride, int pad, int in_h,
                         int in_w) {
  const int b = gy.dim(0), co = gy.dim(1), ho = gy.dim(2), wo = gy.dim(3);
  const int ci = wt.dim(1), k = wt.dim(2);
  const int kk = ci * k * k, hw = ho * wo;
  Tensor gx({b, ci, in_h, in_w});
#pragma omp parallel for schedule(static)
  for (int bi = 0; bi < b; ++bi) {
    std::vector<float> colg(static_cast<size_t>(kk) * hw);
    kern::ops().gemm_tn(kk, hw, co, wt.data(), gy.data() + static_cast<int64_t>(bi) * co * hw,
                        colg.data(), false);
    col2im_add(colg.data(), ci, in_h, in_w, k, stride, pad,
               gx.data() + static_cast<int64_t>(bi) * ci * in_h * in_w);
  }
  return gx;
}

Tensor conv_wgrad_tensor(const Tensor& x, const Tensor& gy, int stride, int pad, int k) {
  const int b = x.dim(0), ci = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int co = gy.dim(1), ho = gy.dim(2), wo = gy.dim(3);
  const int kk = ci * k * k, hw = ho * wo;
  int nthreads = 1;
#if defined(_OPENMP)
  nthreads = omp_get_max_threads();
#endif
  std::vector<Tensor> partial(static_cast<size_t>(nthreads), Tensor({co, ci, k, k}));
#pragma omp parallel for schedule(static)
  for (int bi = 0; bi < b; ++bi) {
    int t = 0;
#if defined(_OPENMP)
    t = omp_get_thread_num();
#endif
    std::vector<float> col(static_cast<size_t>(kk) * hw);
    im2col(x.data() + static_cast<int64_t>(bi) * ci * h * w, ci, h, w, k, stride, pad, col.data());
    kern::ops().gemm_nt(co, kk, hw, gy.data() + static_cast<int64_t>(bi) * co * hw, col.data(),
                        partial[static_cast<size_t>(t)].data(), true);
  }
  Tensor gw = std::move(partial[0]);
  for (int t = 1; t < nthreads; ++t)
    kern::ops().add(static_cast<int>(gw.numel()), gw.data(), partial[static_cast<size_t>(t)].data(),
                    gw.data());
  return gw;
}

}  // namespace

Var conv2d(const Var& x, const Var& w, int stride, int pad) {
  const ConvDims d = conv_dims(x->val, w->val, stride, pad);
  Tensor out = conv_forward(x->val, w->val, stride, pad);
  auto n = std::make_shared<Node>();
  n->val = std::move(out);
  n->op = "conv2d";
  n->needs_grad = x->needs_grad || w->needs_grad;
  if (n->needs_grad) {
    n->parents = {x, w};
    const int h = d.h, wdim = d.w, k = d.k;
    n->vjp = [stride, pad, h, wdim, k](const Var& g, const Var& self) -> std::vector<Var> {
      return {conv2d_igrad(g, self->parents[1], stride, pad, h, wdim),
              conv2d_wgrad(self->parents[0], g, stride, pad, k, k)};
    };
  }
  return n;
}

Var conv2d_igrad(const Var& gy, const Var& w, int stride, int pad, int in_h, int in_w) {
  Tensor out = conv_igrad_tensor(gy->val, w->val, stride, pad, in_h, in_w);
  auto n = std::make_shared<Node>();
  n->val = std::move(out);
  n->op = "conv2d_igrad";
  n->needs_grad = gy->needs_grad || w->needs_grad;
  if (n->needs_grad) {
    n->parents = {gy, w};
    const int k = w->val.dim(2);
    n->vjp = [stride, pad, k](const Var& g, const Var& self) -> std::vector<Var> {
      // linear in both arguments: d/d_gy -> conv2d(g, w); d/d_w -> wgrad(g, gy)
      return {conv2d(g, self->parents[1], stride, pad),
              conv2d_wgrad(g, self->parents[0], stride, pad, k, k)};
    };
  }
  return n;
}

Var conv2d_wgrad(const Var& x, const Var& gy, int stride, int pad, int kh, int kw) {
  (void)kw;
  Tensor out = conv_wgrad_tensor(x->val, gy->val, stride, pad, kh);
  auto n = std::make_shared<Node>();
  n->val = std::move(out);
  n->op = "conv2d_wgrad";
  n->needs_grad = x->needs_grad || gy->needs_grad;
  if (n->needs_grad) {
    n->parents = {x, gy};
    const int in_h = x->val.dim(2), in_w = x->val.dim(3);
    n->vjp = [stride, pad, in_h, in_w](const Var& g, const Var& self) -> std::vector<Var> {
      return {conv2d_igrad(self->parents[1], g, stride, pad, in_h, in_w),
              conv2d(self->parents[0], g, stride, pad)};
    };
  }
  return n;
}

namespace {

struct Tap {
  int i0, i1;
  float w0, w1;
};

std::vector<Tap> up2_taps(int in) {
  std::vector<Tap> taps(static_cast<size_t>(2 * in));
  for (int o = 0; o < 2 * in; ++o) {
    const float c = 0.5f * static_cast<float>(o) - 0.25f;
    int i0 = static_cast<int>(std::floor(c));
    const float f = c - static_cast<float>(i0);
    int i1 = i0 + 1;
    if (i0 < 0) i0 = 0;
    if (i1 > in - 1) i1 = in - 1;
    taps[static_cast<size_t>(o)] = {i0, i1, 1.0f - f, f};
  }
  return taps;
}

Tensor upsample2x_tensor(const Tensor& x) {
  const int b = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const auto ty = up2_taps(h), tx = up2_taps(w);
  Tensor out({b, c, 2 * h, 2 * w});
#pragma omp parallel for schedule(static)
  for (int pc = 0; pc < b * c; ++pc) {
    const float* src = x.data() + static_cast<int64_t>(pc) * h * w;
    float* dst = out.data() + static_cast<int64_t>(pc) * 4 * h * w;
    for (int oy = 0; oy < 2 * h; ++oy) {
      const Tap& tv = ty[static_cast<size_t>(oy)];
      for (int ox = 0; ox < 2 * w; ++ox) {
        const Tap& th = tx[static_cast<size_t>(ox)];
        dst[oy * 2 * w + ox] = tv.w0 * (th.w0 * src[tv.i0 * w + th.i0] + th.w1 * src[tv.i0 * w + th.i1]) +
                               tv.w1 * (th.w0 * src[tv.i1 * w + th.i0] + th.w1 * src[tv.i1 * w + th.i1]);
      }
    }
  }
  return out;
}

Tensor upsample2x_adjoint_tensor(const Tensor& g) {
  const int b = g.dim(0), c = g.dim(1), h2 = g.dim(2), w2 = g.dim(3);
  const int h = h2 / 2, w = w2 / 2;
  const auto ty = up2_taps(h), tx = up2_taps(w);
  Tensor out({b, c, h, w});
#pragma omp parallel for schedule(static)
  for (int pc = 0; pc < b * c; ++pc) {
    const float* src = g.data() + static_cast<int64_t>(pc) * h2 * w2;
    float* dst = out.data() + static_cast<int64_t>(pc) * h * w;
    for (int oy = 0; oy < h2; ++oy) {
      const Tap& tv = ty[static_cast<size_t>(oy)];
      for (int ox = 0; ox < w2; ++ox) {
        const Tap& th = tx[static_cast<size_t>(ox)];
        const float gv = src[oy * w2 + ox];
        dst[tv.i0 * w + th.i0] += tv.w0 * th.w0 * gv;
        dst[tv.i0 * w + th.i1] += tv.w0 * th.w1 * gv;
        dst[tv.i1 * w + th.i0] += tv.w1 * th.w0 * gv;
        dst[tv.i1 * w + th.i1] += tv.w1 * th.w1 * gv;
      }
    }
  }
  return out;
}

Var upsample2x_adjoint(const Var& g);

Var make_simple(Tensor val, const char* op, std::vector<Var> parents,
                std::function<std::vector<Var>(const Var&, const Var&)> vjp) {
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

Var upsample2x_adjoint(const Var& g) {
  return make_simple(upsample2x_adjoint_tensor(g->val), "upsample2x_adj", {g},
                     [](const Var& gg, const Var&) -> std::vector<Var> { return {upsample2x(gg)}; });
}

}  // namespace

Var upsample2x(const Var& x) {
  return make_simple(upsample2x_tensor(x->val), "upsample2x", {x},
                     [](const Var& g, const Var&) -> std::vector<Var> {
                       return {upsample2x_adjoint(g)};
                     });
}

}  // namespace af::ad
