#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace remat {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a, used to fingerprint input files inside output manifests.
std::uint64_t fnv1a64(const std::string& data);
std::string digest_hex(std::uint64_t d);

struct RunManifest {
  std::string command_line;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> input_digests;  // (label, digest)
};

// Comment block for the top of every output file. Wall time is reported on
// stderr instead of here so a rerun of the same manifest stays byte-identical.
std::string manifest_comment(const RunManifest& m);

}  // namespace remat
