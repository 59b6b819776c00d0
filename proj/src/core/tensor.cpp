#include "af/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace af {

int64_t Tensor::numel_of(const std::vector<int>& s) {
  int64_t n = 1;
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("negative tensor dimension");
    n *= d;
  }
  return n;
}

static int64_t flat_index(const std::vector<int>& shape, std::initializer_list<int> idx) {
  if (idx.size() != shape.size()) throw std::invalid_argument("tensor index rank mismatch");
  int64_t flat = 0;
  size_t i = 0;
  for (int k : idx) {
    flat = flat * shape[i] + k;
    ++i;
  }
  return flat;
}

float& Tensor::at(std::initializer_list<int> idx) { return v[static_cast<size_t>(flat_index(shape, idx))]; }
float Tensor::at(std::initializer_list<int> idx) const { return v[static_cast<size_t>(flat_index(shape, idx))]; }

Tensor Tensor::reshaped(std::vector<int> s) const {
  if (numel_of(s) != numel()) throw std::invalid_argument("reshape numel mismatch");
  Tensor out(std::move(s), v);
  return out;
}

bool Tensor::all_finite() const {
  for (float x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) return false;
  return std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(float)) == 0;
}

float max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) throw std::invalid_argument("max_abs_diff shape mismatch");
  float m = 0.0f;
  for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::fabs(a.v[i] - b.v[i]));
  return m;
}

}  // namespace af
