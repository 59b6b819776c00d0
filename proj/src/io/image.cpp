#include "af/image.hpp"

#include <cmath>
#include <stdexcept>

namespace af {

ImageU8 quantize_image(const Tensor& chw) {
  if (chw.ndim() != 3 || chw.dim(0) != 3) throw std::invalid_argument("quantize_image: [3,h,w]");
  const int h = chw.dim(1), w = chw.dim(2);
  ImageU8 img;
  img.h = h;
  img.w = w;
  img.channels = 3;
  img.data.resize(static_cast<size_t>(h) * w * 3);
  const int64_t plane = static_cast<int64_t>(h) * w;
  for (int64_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c) {
      float v = chw.v[c * plane + i];
      v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
      img.data[i * 3 + c] = static_cast<uint8_t>(std::lround(v * 255.0f));
    }
  return img;
}

Tensor to_float_chw(const ImageU8& img) {
  Tensor t({img.channels, img.h, img.w});
  const int64_t plane = static_cast<int64_t>(img.h) * img.w;
  for (int64_t i = 0; i < plane; ++i)
    for (int c = 0; c < img.channels; ++c)
      t.v[c * plane + i] = static_cast<float>(img.data[i * img.channels + c]) / 255.0f;
  return t;
}

}  // namespace af
