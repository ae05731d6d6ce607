#pragma once

// Portable seeded sampling. std::uniform_int_distribution is implementation
// defined, so bounded draws are done here to keep outputs identical across
// standard libraries.

#include <cstdint>
#include <string_view>

namespace afroasr::random {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Order-sensitive stable hash for deriving per-item seeds.
class SeedHasher {
 public:
  explicit constexpr SeedHasher(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {}

  constexpr SeedHasher& mix(std::uint64_t v) noexcept {
    state_ = splitmix64(state_ ^ splitmix64(v));
    return *this;
  }

  constexpr SeedHasher& mix(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ull;
    }
    mix(static_cast<std::uint64_t>(s.size()));
    return mix(h);
  }

  constexpr std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, bound); bound must be positive.
  constexpr std::uint64_t uniform(std::uint64_t bound) noexcept {
    const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next();
      if (r >= limit) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace afroasr::random
