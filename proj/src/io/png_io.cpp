#include "af/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace af {

namespace {

void put_u32be(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>(v & 0xff));
}

uint32_t get_u32be(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | p[3];
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_u32be(out, static_cast<uint32_t>(payload.size()));
  const size_t start = out.size();
  out.append(type, 4);
  out.append(payload);
  const uLong crc = crc32(0, reinterpret_cast<const Bytef*>(out.data() + start), static_cast<uInt>(out.size() - start));
  put_u32be(out, static_cast<uint32_t>(crc));
}

std::string zlib_deflate(const std::string& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string out(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                6) != Z_OK)
    throw std::runtime_error("png: deflate failed");
  out.resize(bound);
  return out;
}

void write_png(const std::string& path, int w, int h, int channels, const uint8_t* data) {
  const int color_type = channels == 1 ? 0 : 2;
  std::string ihdr;
  put_u32be(ihdr, static_cast<uint32_t>(w));
  put_u32be(ihdr, static_cast<uint32_t>(h));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(static_cast<char>(color_type));
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);

  std::string raw;
  raw.reserve(static_cast<size_t>(h) * (1 + static_cast<size_t>(w) * channels));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    raw.append(reinterpret_cast<const char*>(data + static_cast<size_t>(y) * w * channels),
               static_cast<size_t>(w) * channels);
  }

  std::string out("\x89PNG\r\n\x1a\n", 8);
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", zlib_deflate(raw));
  append_chunk(out, "IEND", "");

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("png: cannot open for write: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("png: write failed: " + path);
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

struct Decoded {
  int w = 0, h = 0, channels = 0;
  std::vector<uint8_t> pixels;  // interleaved
};

Decoded read_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("png: cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) != 0)
    throw std::runtime_error("png: bad signature: " + path);

  const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data()) + 8;
  const uint8_t* end = reinterpret_cast<const uint8_t*>(bytes.data()) + bytes.size();
  int w = 0, h = 0, channels = 0;
  std::string idat;
  while (p + 12 <= end) {
    const uint32_t len = get_u32be(p);
    const char* type = reinterpret_cast<const char*>(p + 4);
    const uint8_t* payload = p + 8;
    if (payload + len + 4 > end) throw std::runtime_error("png: truncated chunk");
    if (std::memcmp(type, "IHDR", 4) == 0) {
      w = static_cast<int>(get_u32be(payload));
      h = static_cast<int>(get_u32be(payload + 4));
      const int depth = payload[8], color = payload[9], interlace = payload[12];
      if (depth != 8 || interlace != 0)
        throw std::runtime_error("png: only 8-bit non-interlaced supported");
      switch (color) {
        case 0: channels = 1; break;
        case 2: channels = 3; break;
        case 6: channels = 4; break;
        default: throw std::runtime_error("png: unsupported color type");
      }
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.append(reinterpret_cast<const char*>(payload), len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    p = payload + len + 4;
  }
  if (w <= 0 || h <= 0 || channels == 0) throw std::runtime_error("png: missing IHDR");

  const size_t stride = static_cast<size_t>(w) * channels;
  std::vector<uint8_t> raw((stride + 1) * h);
  uLongf rawlen = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &rawlen, reinterpret_cast<const Bytef*>(idat.data()),
                 static_cast<uLong>(idat.size())) != Z_OK ||
      rawlen != raw.size())
    throw std::runtime_error("png: inflate failed: " + path);

  Decoded out;
  out.w = w;
  out.h = h;
  out.channels = channels;
  out.pixels.assign(stride * h, 0);
  const int bpp = channels;
  for (int y = 0; y < h; ++y) {
    const uint8_t filter = raw[(stride + 1) * y];
    const uint8_t* src = raw.data() + (stride + 1) * y + 1;
    uint8_t* cur = out.pixels.data() + stride * y;
    const uint8_t* up = y > 0 ? out.pixels.data() + stride * (y - 1) : nullptr;
    for (size_t x = 0; x < stride; ++x) {
      const int a = x >= static_cast<size_t>(bpp) ? cur[x - bpp] : 0;
      const int b = up ? up[x] : 0;
      const int c = (up && x >= static_cast<size_t>(bpp)) ? up[x - bpp] : 0;
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw std::runtime_error("png: bad filter byte");
      }
      cur[x] = static_cast<uint8_t>(v & 0xff);
    }
  }
  return out;
}

}  // namespace

void write_png_rgb(const std::string& path, const ImageU8& img) {
  if (img.channels != 3) throw std::invalid_argument("write_png_rgb: 3 channels required");
  write_png(path, img.w, img.h, 3, img.data.data());
}

ImageU8 read_png_rgb(const std::string& path) {
  Decoded d = read_png(path);
  ImageU8 img;
  img.h = d.h;
  img.w = d.w;
  img.channels = 3;
  img.data.resize(static_cast<size_t>(d.h) * d.w * 3);
  const size_t n = static_cast<size_t>(d.h) * d.w;
  for (size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c)
      img.data[i * 3 + c] = d.channels == 1 ? d.pixels[i] : d.pixels[i * d.channels + c];
  return img;
}

void write_png_gray(const std::string& path, const SegMap& seg) {
  write_png(path, seg.w, seg.h, 1, seg.labels.data());
}

SegMap read_png_gray(const std::string& path) {
  Decoded d = read_png(path);
  if (d.channels != 1) throw std::runtime_error("png: expected grayscale: " + path);
  SegMap seg;
  seg.h = d.h;
  seg.w = d.w;
  seg.labels = std::move(d.pixels);
  return seg;
}

}  // namespace af
