#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace drape {

/// 64-bit FNV-1a, incremental.
class Fnv1a {
public:
  void bytes(const void *data, std::size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ULL;
    }
  }
  void str(std::string_view s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    bytes(s.data(), s.size());
  }
  template <typename T> void value(const T &v) { bytes(&v, sizeof v); }
  std::uint64_t digest() const { return h_; }
  std::string hex() const { return fmt::format("{:016x}", h_); }

private:
  std::uint64_t h_ = 14695981039346656037ULL;
};

inline std::string fnv1a_hex(std::span<const std::uint8_t> data) {
  Fnv1a h;
  h.bytes(data.data(), data.size());
  return h.hex();
}

} // namespace drape
