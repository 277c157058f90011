#include "sigrisk/rng.hpp"

#include <cmath>

namespace sigrisk {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (counter_++) * kGolden); }

double CounterRng::next_uniform() {
  // 53-bit mantissa, shifted into (0, 1): never returns 0 or 1.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

int CounterRng::next_poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  const double threshold = std::exp(-mean);
  int count = -1;
  double product = 1.0;
  do {
    product *= next_uniform();
    ++count;
  } while (product > threshold);
  return count;
}

}  // namespace sigrisk
