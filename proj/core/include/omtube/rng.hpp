#pragma once

#include <cstdint>
#include <random>

namespace omtube {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`; depends only on the pair, so
/// per-path streams do not depend on scheduling.
constexpr std::uint64_t mix64(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ (index * 0xD6E8FEB86659FD93ULL + 0x2545F4914F6CDD1DULL));
}

/// Standard normal variates (ziggurat) driven by a mt19937_64 engine.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();
  /// Uniform on [0, 1).
  double uniform();

 private:
  std::mt19937_64 engine_;
};

}  // namespace omtube
