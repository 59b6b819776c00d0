#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace af {

/// Dense row-major float32 tensor, up to 4 dimensions.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) { v.assign(numel_of(shape), 0.0f); }
  Tensor(std::vector<int> s, float fill) : shape(std::move(s)) { v.assign(numel_of(shape), fill); }
  Tensor(std::vector<int> s, std::vector<float> data) : shape(std::move(s)), v(std::move(data)) {}

  static int64_t numel_of(const std::vector<int>& s);
  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<int> s, float x) { return Tensor(std::move(s), x); }
  static Tensor scalar(float x) { return Tensor({1}, std::vector<float>{x}); }

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  float* data() { return v.data(); }
  const float* data() const { return v.data(); }

  float& at(std::initializer_list<int> idx);
  float at(std::initializer_list<int> idx) const;

  Tensor reshaped(std::vector<int> s) const;
  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;

  std::string shape_str() const;
};

/// Strict elementwise equality (shape and bits).
bool bit_equal(const Tensor& a, const Tensor& b);

/// max |a-b|; tensors must share a shape.
float max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace af
