#pragma once

#include <array>
#include <cstdint>

namespace bvg {

// Splittable pseudo-random stream keyed by (seed, stream-id).
//
// The generator is xoshiro256** seeded through SplitMix64 from the key, so a
// given (seed, stream-id) produces the same sequence on every platform.
// Gaussians come from Box-Muller on 53-bit uniforms; no <random>
// distributions are involved because their output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_zero();
  /// Standard normal.
  double normal();

  /// Child stream derived by hashing (stream-id, child). The result depends
  /// only on the parent key, not on how far the parent has been advanced.
  RngStream split(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; also used to derive child keys and config hashes.
std::uint64_t mix64(std::uint64_t x);

}  // namespace bvg
