#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

#include "fracvi/linalg.hpp"

namespace fracvi {

/// Deterministic splittable generator (SplitMix64 core). Every random draw in
/// the experiment suites flows from a single 64-bit seed through named
/// streams, so reports are reproducible bit-for-bit on the same build.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1). 53-bit mantissa, platform-independent.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (deterministic, no cached spare).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
  }

  std::uint64_t uniform_index(std::uint64_t n) { return n ? next_u64() % n : 0; }

  /// Child stream derived from this generator's seed and a textual tag.
  /// Independent streams for independent jobs keep parallel merges deterministic.
  SplitMix64 split(std::string_view tag) const {
    std::uint64_t h = 0xCBF29CE484222325ull ^ state_;
    for (char c : tag) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 0x100000001B3ull;
    }
    SplitMix64 child(h);
    child.next_u64();  // decorrelate from the raw hash
    return child;
  }

  Vector normal_vector(std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = normal();
    return v;
  }

  Vector nonnegative_vector(std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = std::abs(normal());
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fracvi
