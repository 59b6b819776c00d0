#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace af {

/// Streaming SHA-256 (FIPS 180-4). Used for content addressing of manifests
/// and dataset files.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, size_t len);
  void update(const std::string& s) { update(s.data(), s.size()); }
  /// Finalize and return lowercase hex digest. The object must not be reused.
  std::string hex_digest();

 private:
  void process_block(const uint8_t* p);
  uint32_t h_[8];
  uint8_t buf_[64];
  size_t buflen_ = 0;
  uint64_t total_ = 0;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

}  // namespace af
