#pragma once

#include <cstdint>
#include <random>

namespace orddid {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream `index` of a master seed. Depends only on the pair, so
/// parallel schedules cannot change what a stream draws.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t salt = 0) {
  return mix64(mix64(master ^ mix64(salt)) + index);
}

/// Portable generator: mt19937_64 plus distribution code that does not rely
/// on implementation-defined std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Standard normal by inversion.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace orddid
