#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace surfpart {

// Portable seeded generator: mt19937_64's output sequence is fixed by the
// standard, and the bounded draw below avoids the implementation-defined
// std::uniform_int_distribution.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/rejection";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace surfpart
