#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "af/tensor.hpp"

namespace af::ad {

class Node;
using Var = std::shared_ptr<Node>;

/// A node in the computation tape. Backward passes are themselves built from
/// tape ops, so gradients are differentiable (needed for R1 and path-length
/// penalties, which are losses on gradients).
class Node {
 public:
  Tensor val;
  bool needs_grad = false;
  const char* op = "leaf";
  std::vector<Var> parents;
  // Returns one grad per parent (null Var = no gradient). `self` is this
  // node's own Var, passed in to avoid closure self-cycles.
  std::function<std::vector<Var>(const Var& g, const Var& self)> vjp;
};

Var constant(Tensor t);
Var leaf(Tensor t);  // differentiable input

inline const Tensor& value(const Var& x) { return x->val; }

// ---- elementwise (numpy-style right-aligned broadcasting, rank <= 4) ----
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var divv(const Var& a, const Var& b);
Var neg(const Var& x);
Var scale(const Var& x, float s);
Var add_scalar(const Var& x, float s);
Var square(const Var& x);
Var sqrtv(const Var& x);
Var expv(const Var& x);
Var logv(const Var& x);
Var absv(const Var& x);
Var sigmoid(const Var& x);
Var softplus(const Var& x);
Var lrelu(const Var& x, float slope);

// ---- linear algebra ----
Var matmul(const Var& a, const Var& b);     // [m,k]x[k,n]
Var matmul_nt(const Var& a, const Var& b);  // [m,k]x[n,k]^T -> [m,n]
Var matmul_tn(const Var& a, const Var& b);  // [k,m]^T x [k,n] -> [m,n]

// ---- convolution (NCHW, square kernel, symmetric zero padding) ----
Var conv2d(const Var& x, const Var& w, int stride, int pad);
Var conv2d_igrad(const Var& gy, const Var& w, int stride, int pad, int in_h, int in_w);
Var conv2d_wgrad(const Var& x, const Var& gy, int stride, int pad, int kh, int kw);

// ---- shape / reduction ----
Var reshape(const Var& x, std::vector<int> shape);
Var permute(const Var& x, std::vector<int> perm);
Var slicev(const Var& x, int axis, int start, int len);
Var concatv(const std::vector<Var>& xs, int axis);
Var broadcast_to(const Var& x, std::vector<int> shape);
Var sum_to_shape(const Var& x, std::vector<int> shape);
Var sum_all(const Var& x);   // -> [1]
Var mean_all(const Var& x);  // -> [1]
Var sum_axis(const Var& x, int axis, bool keepdim);
Var mean_axis(const Var& x, int axis, bool keepdim);
Var softmax(const Var& x, int axis);
Var pick(const Var& x, const std::vector<int>& idx);  // [m,n],idx[m] -> [m]
Var upsample2x(const Var& x);                         // bilinear, [B,C,h,w] -> [B,C,2h,2w]
Var detach(const Var& x);

// ---- backward ----
struct Grads {
  std::unordered_map<const Node*, Var> by_node;
  Var of(const Var& x) const;
  /// Gradient tensor (zeros if the node is unreachable from the root).
  Tensor tensor_of(const Var& x) const;
};

/// Reverse-mode sweep from a scalar root. The returned grads are Vars and can
/// be differentiated again.
Grads backward(const Var& root);

}  // namespace af::ad
