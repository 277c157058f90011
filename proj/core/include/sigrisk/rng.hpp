#pragma once

// Counter-based pseudo-random source: draw i of stream s under seed k is
// mix64(key(k, s) + i * GOLDEN), the SplitMix64 output function applied to a
// keyed counter. Streams are independent by construction, so path generation
// parallelised across members reproduces the serial run bit for bit.
// Cross-run determinism is guaranteed within one build; bit-equality across
// implementations is not a contract.

#include <cstdint>

namespace sigrisk {

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double next_uniform();  // open interval (0, 1)
  double next_normal();   // standard normal, Box-Muller
  // Poisson count by Knuth's product-of-uniforms method; intended for the
  // small per-step intensities of a desk-scale jump model.
  int next_poisson(double mean);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace sigrisk
