#include "remat/manifest.hpp"

#include <sstream>

namespace remat {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t d) {
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[d & 0xf];
    d >>= 4;
  }
  return out;
}

std::string manifest_comment(const RunManifest& m) {
  std::ostringstream out;
  out << "# remat " << kToolVersion << "\n";
  out << "# command: " << m.command_line << "\n";
  out << "# seed: " << m.seed << "\n";
  for (const auto& [label, digest] : m.input_digests)
    out << "# input " << label << ": " << digest_hex(digest) << "\n";
  return out.str();
}

}  // namespace remat
