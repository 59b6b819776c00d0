#pragma once

#include <vector>

#include "af/tensor.hpp"

namespace af {

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

/// Adam over a fixed list of externally owned parameter tensors.
class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamConfig cfg);

  void set_lr(float lr) { cfg_.lr = lr; }
  float lr() const { return cfg_.lr; }
  /// One update; `grads` must parallel the parameter list.
  void step(const std::vector<Tensor>& grads);

 private:
  std::vector<Tensor*> params_;
  AdamConfig cfg_;
  std::vector<Tensor> m_, v_;
  int64_t t_ = 0;
};

}  // namespace af
