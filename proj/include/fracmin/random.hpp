#pragma once

#include <cstdint>

namespace fracmin {

/// SplitMix64 stream. Counter-based: the n-th output is a fixed mixing
/// function of seed + n * 0x9E3779B97F4A7C15, so streams are reproducible
/// bit-for-bit on any platform with IEEE doubles.
///
/// Gaussians use the Box-Muller transform on consecutive output pairs
/// (u1 in (0,1], u2 in [0,1)): z0 = sqrt(-2 ln u1) cos(2 pi u2) is returned
/// first, z1 = sqrt(-2 ln u1) sin(2 pi u2) second.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double gaussian();
  /// Uniform integer in [0, bound), modulo with rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

/// Seed of the index-th independent stream under a master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace fracmin
