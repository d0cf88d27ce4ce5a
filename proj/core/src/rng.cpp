#include "rasplit/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rasplit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t id)
    : key_(mix64(mix64(seed) ^ mix64(id + 0x632BE59BD9B4E019ULL))) {}

Stream::Stream(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

Stream Stream::child(std::uint64_t id) const {
  return Stream(mix64(key_ ^ mix64(id + 0xD1B54A32D192ED03ULL)), 0, 0);
}

std::uint64_t Stream::bits_at(std::uint64_t counter) const {
  return mix64(key_ + counter * kGolden);
}

std::uint64_t Stream::next_bits() { return bits_at(counter_++); }

double Stream::uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Stream::normal(double mean, double stddev) {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t Stream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Stream::below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t r = next_bits();
    if (r < limit) return r % n;
  }
}

std::vector<std::uint8_t> random_subset_mask(std::size_t n, std::size_t k, Stream& stream) {
  if (k == 0 || k > n) throw std::invalid_argument("random_subset_mask: need 1 <= k <= n");
  std::vector<std::uint8_t> mask(n, 0);
  if (k == n) {
    std::fill(mask.begin(), mask.end(), 1);
    return mask;
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(stream.below(n - i));
    std::swap(perm[i], perm[j]);
    mask[perm[i]] = 1;
  }
  return mask;
}

}  // namespace rasplit
