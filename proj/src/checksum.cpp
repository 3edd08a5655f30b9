#include "netae/checksum.hpp"

#include <fstream>
#include <sstream>

#include "netae/errors.hpp"

namespace netae {

std::string hex_u64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for checksum: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex_u64(fnv1a64(buf.str()));
}

}  // namespace netae
