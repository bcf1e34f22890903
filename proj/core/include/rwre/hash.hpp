#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "rwre/lattice.hpp"

namespace rwre {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ull));
}

/// Counter-based draw keyed on (seed, site, stream). Sites are hashed
/// coordinate by coordinate, so the value is a pure function of the key.
std::uint64_t site_hash(std::uint64_t seed, const Point& site, std::uint64_t stream) noexcept;

/// Maps 64 random bits to a double in [0, 1) with 53 bits of resolution.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t fnv1a(std::string_view text) noexcept;

/// Seed tree: parent -> child by tag (module name) or by index (replicate).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Sequential SplitMix64 stream; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return to_unit((*this)()); }

 private:
  std::uint64_t state_;
};

}  // namespace rwre
