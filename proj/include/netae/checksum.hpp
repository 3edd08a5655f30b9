#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace netae {

// FNV-1a, 64 bit. Used to stamp reports with dataset/config/schema checksums.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_u64(std::uint64_t value);

// checksum of a file's raw bytes; throws DataError if the file is unreadable
std::string file_checksum(const std::string& path);

}  // namespace netae
