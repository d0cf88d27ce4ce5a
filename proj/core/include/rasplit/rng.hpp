#pragma once

#include <cstdint>
#include <vector>

namespace rasplit {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. Draw i of stream (seed, id) is
/// mix64(key(seed, id) + i * golden), so any draw can be reproduced
/// without replaying earlier ones and parallel consumers never interfere.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t id);

  /// Child stream keyed by an extra identifier.
  Stream child(std::uint64_t id) const;

  std::uint64_t bits_at(std::uint64_t counter) const;
  std::uint64_t next_bits();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Normal with the given mean and standard deviation (Box-Muller, cosine branch).
  double normal(double mean = 0.0, double stddev = 1.0);
  /// Uniform integer in [0, n). Rejection sampling, so unbiased.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t counter() const { return counter_; }
  std::uint64_t key() const { return key_; }

 private:
  Stream(std::uint64_t key, std::uint64_t counter, int);
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniformly random size-k subset of {0..n-1}, returned as a 0/1 mask.
/// Partial Fisher-Yates over a stream dedicated to this draw.
std::vector<std::uint8_t> random_subset_mask(std::size_t n, std::size_t k, Stream& stream);

}  // namespace rasplit
