#include "af/container.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace af {

namespace {
constexpr char kMagic[4] = {'A', 'F', 'C', '1'};
constexpr uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

const Tensor& Container::get(const std::string& name) const {
  for (const auto& [n, t] : arrays)
    if (n == name) return t;
  throw std::out_of_range("container: missing array: " + name);
}

bool Container::has(const std::string& name) const {
  for (const auto& [n, t] : arrays)
    if (n == name) return true;
  return false;
}

void write_container(const std::string& path, const Container& c) {
  nlohmann::json header;
  header["kind"] = c.kind;
  header["meta"] = c.meta;
  auto arrays = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : c.arrays) {
    nlohmann::json a;
    a["name"] = name;
    a["shape"] = t.shape;
    a["offset"] = offset;
    a["count"] = t.numel();
    arrays.push_back(a);
    offset += static_cast<uint64_t>(t.numel()) * sizeof(float);
  }
  header["arrays"] = arrays;
  const std::string hs = header.dump();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("container: cannot open for write: " + path);
  f.write(kMagic, 4);
  write_pod<uint32_t>(f, kVersion);
  write_pod<uint64_t>(f, hs.size());
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, t] : c.arrays)
    f.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.numel() * sizeof(float)));
  if (!f) throw std::runtime_error("container: write failed: " + path);
}

Container read_container(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("container: cannot open: " + path);
  char magic[4];
  f.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("container: bad magic: " + path);
  const uint32_t version = read_pod<uint32_t>(f);
  if (version != kVersion) throw std::runtime_error("container: unsupported version");
  const uint64_t hlen = read_pod<uint64_t>(f);
  std::string hs(hlen, '\0');
  f.read(hs.data(), static_cast<std::streamsize>(hlen));
  const nlohmann::json header = nlohmann::json::parse(hs);

  Container c;
  c.kind = header.at("kind").get<std::string>();
  c.meta = header.value("meta", nlohmann::json::object());
  for (const auto& a : header.at("arrays")) {
    const std::vector<int> shape = a.at("shape").get<std::vector<int>>();
    Tensor t(shape);
    f.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.numel() * sizeof(float)));
    if (!f) throw std::runtime_error("container: truncated arrays: " + path);
    c.arrays.emplace_back(a.at("name").get<std::string>(), std::move(t));
  }
  return c;
}

}  // namespace af
