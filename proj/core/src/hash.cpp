#include "rwre/hash.hpp"

namespace rwre {

std::uint64_t site_hash(std::uint64_t seed, const Point& site, std::uint64_t stream) noexcept {
  std::uint64_t h = hash_combine(seed, stream);
  for (Coord v : site.c) h = hash_combine(h, static_cast<std::uint64_t>(v));
  return h;
}

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) noexcept {
  return hash_combine(parent, fnv1a(tag));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return hash_combine(splitmix64(parent), index);
}

}  // namespace rwre
