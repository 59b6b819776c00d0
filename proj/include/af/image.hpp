#pragma once

#include <cstdint>
#include <vector>

#include "af/tensor.hpp"

namespace af {

/// 8-bit interleaved image (HWC). The storage form for datasets and PNGs.
struct ImageU8 {
  int h = 0, w = 0, channels = 3;
  std::vector<uint8_t> data;

  bool operator==(const ImageU8&) const = default;
};

/// Per-pixel semantic labels (values from engines::PartLabel).
struct SegMap {
  int h = 0, w = 0;
  std::vector<uint8_t> labels;

  bool operator==(const SegMap&) const = default;
};

/// Quantize a [3,h,w] float tensor in [0,1] to 8-bit, round-half-up.
ImageU8 quantize_image(const Tensor& chw);
/// Expand an 8-bit image to a [3,h,w] float tensor in [0,1].
Tensor to_float_chw(const ImageU8& img);

}  // namespace af
