#pragma once

#include <string>

#include "af/image.hpp"

namespace af {

/// Minimal PNG codec (8-bit grayscale/RGB/RGBA, non-interlaced) over zlib.
/// Writes filter-0 scanlines; reads any standard row filter. RGBA inputs are
/// read with alpha dropped, grayscale is replicated to three channels by
/// read_png_rgb.
void write_png_rgb(const std::string& path, const ImageU8& img);
ImageU8 read_png_rgb(const std::string& path);

/// Segmentation maps persist as single-channel PNGs storing the label value
/// directly (label -> pixel value i, documented in docs/formats.md).
void write_png_gray(const std::string& path, const SegMap& seg);
SegMap read_png_gray(const std::string& path);

}  // namespace af
