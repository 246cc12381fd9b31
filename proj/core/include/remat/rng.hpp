#pragma once

#include <cstdint>
#include <vector>

namespace remat {

// Deterministic generator with explicit draw algorithms. std::mt19937 itself is
// portable but the standard distributions are not, so uniform draws and
// shuffles are implemented here and results stay stable across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

  // Independent stream for trial `idx` under a master seed. Streams are
  // decorrelated by mixing both values through splitmix64.
  static Rng stream(std::uint64_t master_seed, std::uint64_t idx) {
    return Rng(splitmix(master_seed) ^ (0x9e3779b97f4a7c15ULL * (idx + 1)));
  }

  std::uint64_t next_u64() {
    // xorshift* variant; period 2^64-1, plenty for Monte Carlo use here.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  // Uniform on [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates, last position first.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return (x ^ (x >> 31)) | 1ULL;  // xorshift state must be nonzero
  }

  std::uint64_t state_;
};

}  // namespace remat
