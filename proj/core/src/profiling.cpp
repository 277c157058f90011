#include "sigrisk/profiling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "sigrisk/path_signature.hpp"
#include "sigrisk/rng.hpp"

namespace sigrisk {

namespace {

using clock_type = std::chrono::steady_clock;

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

LatencyStats profile_update_valuation(const AlgebraShape& shape, std::size_t n_ticks,
                                      const TruncatedTensor& weights, std::uint64_t seed) {
  const int n_assets = shape.dim() - 1;
  CounterRng rng(seed, 0);
  std::vector<double> values(static_cast<std::size_t>(n_assets), 0.0);
  RunningSignature running(shape, 0.0, values);

  const double dt = 1.0 / 252.0 / 390.0;  // one minute of a trading year
  std::vector<double> samples_us;
  samples_us.reserve(n_ticks);
  double sink = 0.0;
  double time = 0.0;
  for (std::size_t i = 0; i < n_ticks; ++i) {
    time += dt;
    for (double& v : values) v += 1e-4 * rng.next_normal();
    const auto t0 = clock_type::now();
    running.push(time, values);
    sink += inner_product(weights, running.sig().tensor());
    const auto t1 = clock_type::now();
    samples_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  // Keep the accumulated valuations observable so the loop cannot be elided.
  if (!std::isfinite(sink)) samples_us.clear();

  std::sort(samples_us.begin(), samples_us.end());
  LatencyStats stats;
  stats.count = samples_us.size();
  stats.p50_us = percentile(samples_us, 0.50);
  stats.p90_us = percentile(samples_us, 0.90);
  stats.p99_us = percentile(samples_us, 0.99);
  stats.max_us = samples_us.empty() ? 0.0 : samples_us.back();
  stats.mean_us = samples_us.empty()
                      ? 0.0
                      : std::accumulate(samples_us.begin(), samples_us.end(), 0.0) /
                            static_cast<double>(samples_us.size());
  return stats;
}

std::vector<ScalingPoint> profile_valuation_scaling(int dim, const std::vector<int>& depths,
                                                    std::size_t batch, std::size_t rounds) {
  std::vector<ScalingPoint> points;
  points.reserve(depths.size());
  CounterRng rng(7, 0);
  for (int depth : depths) {
    const AlgebraShape shape(dim, depth);
    const std::size_t d_count = shape.total_size();
    // A rotating batch of targets keeps the measurement out of the trivially
    // cached single-vector case while staying memory-resident.
    std::vector<double> pool(batch * d_count);
    for (double& v : pool) v = rng.next_normal();
    std::vector<double> w(d_count);
    for (double& v : w) v = rng.next_normal();

    double best_ns = std::numeric_limits<double>::infinity();
    for (std::size_t round = 0; round < rounds; ++round) {
      double sink = 0.0;
      const auto t0 = clock_type::now();
      for (std::size_t b = 0; b < batch; ++b) {
        const double* phi = pool.data() + b * d_count;
        double acc = 0.0;
        for (std::size_t i = 0; i < d_count; ++i) acc += w[i] * phi[i];
        sink += acc;
      }
      const auto t1 = clock_type::now();
      if (!std::isfinite(sink)) continue;
      const double ns =
          std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(batch);
      best_ns = std::min(best_ns, ns);
    }
    points.push_back(ScalingPoint{depth, d_count, best_ns});
  }
  return points;
}

}  // namespace sigrisk
