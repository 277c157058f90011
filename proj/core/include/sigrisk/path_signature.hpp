#pragma once

// Signatures of time-augmented piecewise-linear market paths, batch and
// streaming. Per linear segment the signature is the exponential of the
// level-1 increment (exact, no quadrature), and segments compose by the
// concatenation product.

#include <span>
#include <stdexcept>
#include <vector>

#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

class out_of_order_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time-augmented piecewise-linear path: strictly increasing times (year
// fractions) plus an m x n_assets matrix of asset coordinates (price or
// log-price, per ingestion config). The engine channel 0 is always time.
struct TimedPath {
  std::vector<double> times;
  std::vector<double> values;  // row-major, m x n_assets
  int n_assets = 0;

  std::size_t size() const { return times.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(n_assets),
            static_cast<std::size_t>(n_assets)};
  }
  void validate() const;
};

// Signature of the time-augmented path; shape.dim() must equal
// 1 + path.n_assets.
GroupElement compute_signature(const TimedPath& path, const AlgebraShape& shape);

// Signature of a raw d-dimensional piecewise-linear point sequence with no
// implicit time channel. Test fixtures (closed loops) need this form.
GroupElement compute_signature_raw(const std::vector<std::vector<double>>& points,
                                   const AlgebraShape& shape);

// Streaming signature over a tick stream. Single-writer: one consumer calls
// push(); snapshots are plain copies and may be read from other threads.
class RunningSignature {
 public:
  RunningSignature(const AlgebraShape& shape, double start_time,
                   std::span<const double> start_values);

  // Consume one tick. Cost O(D * d), independent of history length.
  // Non-increasing timestamps are rejected with out_of_order_error and
  // leave the state untouched.
  void push(double time, std::span<const double> values);

  const AlgebraShape& shape() const { return shape_; }
  const GroupElement& sig() const { return sig_; }
  double last_time() const { return last_time_; }
  std::span<const double> last_values() const { return last_values_; }
  std::uint64_t tick_count() const { return tick_count_; }

 private:
  AlgebraShape shape_;
  GroupElement sig_;
  double last_time_;
  std::vector<double> last_values_;
  std::uint64_t tick_count_;
  std::vector<double> increment_;   // scratch, dim entries
  TruncatedTensor segment_scratch_;
};

// Functional form of the streaming update; returns the advanced copy.
RunningSignature update(const RunningSignature& rs, double time,
                        std::span<const double> values);

// SigSwap payoff: coordinatewise realised - strike. When the strike is
// group-like the scalar level cancels to zero.
TruncatedTensor sigswap_payoff(const GroupElement& realised, const TruncatedTensor& strike);

}  // namespace sigrisk
