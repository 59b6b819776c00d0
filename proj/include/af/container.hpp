#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "af/tensor.hpp"

namespace af {

/// Versioned binary container: named float32 arrays plus a JSON header
/// carrying an architecture/metadata block. Layout (little-endian):
///   magic "AFC1" | u32 version | u64 header_len | header JSON | raw f32 data
/// Used for generator/discriminator/estimator checkpoints, mean-latent files
/// and latent archives. Byte-deterministic: no timestamps, sorted JSON keys.
struct Container {
  std::string kind;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Tensor>> arrays;

  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const;
};

void write_container(const std::string& path, const Container& c);
Container read_container(const std::string& path);

}  // namespace af
