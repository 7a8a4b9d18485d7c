#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "sonoforge/errors.hpp"

namespace sonoforge {

/// Counter-based random stream: draw k depends only on (seed, counter+k),
/// so identical (seed, counter) pairs replay identically on every platform
/// and streams can be split without sharing state.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  bool operator==(const RngStream&) const = default;
};

namespace detail {

inline std::uint64_t avalanche64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

inline std::uint64_t rng_next_u64(RngStream& s) {
  ++s.counter;
  return detail::avalanche64(s.seed + s.counter * 0x9E3779B97F4A7C15ull);
}

/// Uniform draw in [lo, hi); degenerate lo == hi returns lo.
inline double rng_uniform(RngStream& s, double lo, double hi) {
  require(lo <= hi, ErrorCode::InvalidArgument, "rng_uniform: lo > hi");
  const double u = static_cast<double>(rng_next_u64(s) >> 11) * 0x1.0p-53;
  double v = lo + u * (hi - lo);
  if (v >= hi && lo < hi) v = std::nextafter(hi, lo);
  return v;
}

/// Uniform integer in [0, n); n must be positive.
inline std::uint64_t rng_uniform_int(RngStream& s, std::uint64_t n) {
  require(n > 0, ErrorCode::InvalidArgument, "rng_uniform_int: n == 0");
  return rng_next_u64(s) % n;
}

/// Standard normal via Box-Muller (consumes two draws).
inline double rng_gaussian(RngStream& s) {
  const double u1 = 1.0 - rng_uniform(s, 0.0, 1.0);  // (0, 1]
  const double u2 = rng_uniform(s, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

/// Independent child stream; stream_id selects the branch.
inline RngStream rng_split(const RngStream& s, std::uint64_t stream_id) {
  return RngStream{
      detail::avalanche64(s.seed ^
                          detail::avalanche64(stream_id + 0x632BE59BD9B4E019ull)),
      0};
}

inline std::uint64_t hash64_text(std::string_view text) {
  // FNV-1a 64, then one avalanche round.
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return detail::avalanche64(h);
}

/// Stream for (global seed, pattern id, copy index, op index); identical
/// inputs give an identical stream regardless of scheduling or platform.
inline RngStream derive_seed(std::uint64_t global_seed, std::string_view pattern_id,
                             std::uint64_t copy, std::uint64_t op) {
  std::uint64_t h = global_seed;
  h = detail::avalanche64(h ^ hash64_text(pattern_id));
  h = detail::avalanche64(h ^ (copy + 0x9E3779B97F4A7C15ull));
  h = detail::avalanche64(h ^ (op + 0xD1B54A32D192ED03ull));
  return RngStream{h, 0};
}

}  // namespace sonoforge
