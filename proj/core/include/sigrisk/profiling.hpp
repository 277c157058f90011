#pragma once

// Latency instrumentation for the streaming hot path: per-tick incremental
// update plus portfolio valuation, and the valuation-only scaling sweep
// across truncation depths. Shared by the CLI --profile flag and the
// acceptance suite so both measure the same code path.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

struct LatencyStats {
  double p50_us = 0.0;
  double p90_us = 0.0;
  double p99_us = 0.0;
  double max_us = 0.0;
  double mean_us = 0.0;
  std::size_t count = 0;
};

// Stream n_ticks synthetic ticks through a RunningSignature, valuing the
// given weight tensor against the running signature after every update.
LatencyStats profile_update_valuation(const AlgebraShape& shape, std::size_t n_ticks,
                                      const TruncatedTensor& weights, std::uint64_t seed = 1);

struct ScalingPoint {
  int depth = 0;
  std::size_t coordinate_count = 0;  // D
  double ns_per_valuation = 0.0;
};

// Mean wall time of a single inner product <w, phi> per depth, amortised
// over a large batch to keep clock overhead out of the figure.
std::vector<ScalingPoint> profile_valuation_scaling(int dim, const std::vector<int>& depths,
                                                    std::size_t batch = 1 << 14,
                                                    std::size_t rounds = 64);

}  // namespace sigrisk
