#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gairl {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent sub-stream seed for a named component of a run. The same
/// (master, stream) pair always yields the same seed on every platform.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  return mix64(mix64(master) ^ fnv1a(stream));
}

inline Rng make_rng(std::uint64_t master, std::string_view stream) {
  return Rng{derive_seed(master, stream)};
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace gairl
