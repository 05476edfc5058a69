#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace commentqc {

// splitmix64 finalizer; full-period bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {
template <typename T>
  requires std::is_integral_v<T>
inline std::uint64_t seed_part(T v) {
  return static_cast<std::uint64_t>(v);
}
inline std::uint64_t seed_part(std::string_view s) { return hash_str(s); }
inline std::uint64_t seed_part(const char* s) { return hash_str(s); }
} // namespace detail

/// Named seed derivation: every PRNG stream in the project is keyed off the
/// run seed plus a fixed tag sequence, so results do not depend on thread
/// scheduling or evaluation order.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t base, Parts&&... parts) {
  std::uint64_t h = mix64(base);
  ((h = mix64(h ^ detail::seed_part(parts))), ...);
  return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform_real(rng, std::log(lo), std::log(hi)));
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

} // namespace commentqc
