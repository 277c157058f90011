#include "sigrisk/path_signature.hpp"

#include <cmath>
#include <string>

namespace sigrisk {

void TimedPath::validate() const {
  if (times.size() < 2) throw std::invalid_argument("TimedPath: need at least 2 points");
  if (n_assets < 1) throw std::invalid_argument("TimedPath: need at least 1 asset column");
  if (values.size() != times.size() * static_cast<std::size_t>(n_assets))
    throw std::invalid_argument("TimedPath: values size does not match times x n_assets");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("TimedPath: times must be strictly increasing (row " +
                                  std::to_string(i) + ")");
  for (double t : times)
    if (!std::isfinite(t)) throw std::invalid_argument("TimedPath: non-finite time");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("TimedPath: non-finite value");
}

GroupElement compute_signature(const TimedPath& path, const AlgebraShape& shape) {
  path.validate();
  if (shape.dim() != path.n_assets + 1)
    throw std::invalid_argument(
        "compute_signature: shape.dim must equal 1 + asset column count");
  TruncatedTensor acc(shape);
  acc.set_scalar(1.0);
  TruncatedTensor seg(shape);
  std::vector<double> inc(static_cast<std::size_t>(shape.dim()));
  for (std::size_t m = 1; m < path.size(); ++m) {
    inc[0] = path.times[m] - path.times[m - 1];
    auto prev = path.row(m - 1);
    auto cur = path.row(m);
    for (int a = 0; a < path.n_assets; ++a) inc[static_cast<std::size_t>(a) + 1] = cur[a] - prev[a];
    segment_exp_into(seg, inc);
    multiply_inplace(acc, seg);
  }
  return GroupElement(std::move(acc));
}

GroupElement compute_signature_raw(const std::vector<std::vector<double>>& points,
                                   const AlgebraShape& shape) {
  if (points.size() < 2)
    throw std::invalid_argument("compute_signature_raw: need at least 2 points");
  const std::size_t d = static_cast<std::size_t>(shape.dim());
  for (const auto& p : points)
    if (p.size() != d)
      throw std::invalid_argument("compute_signature_raw: point dimension mismatch");
  TruncatedTensor acc(shape);
  acc.set_scalar(1.0);
  TruncatedTensor seg(shape);
  std::vector<double> inc(d);
  for (std::size_t m = 1; m < points.size(); ++m) {
    for (std::size_t c = 0; c < d; ++c) inc[c] = points[m][c] - points[m - 1][c];
    segment_exp_into(seg, inc);
    multiply_inplace(acc, seg);
  }
  return GroupElement(std::move(acc));
}

RunningSignature::RunningSignature(const AlgebraShape& shape, double start_time,
                                   std::span<const double> start_values)
    : shape_(shape),
      sig_(identity(shape)),
      last_time_(start_time),
      last_values_(start_values.begin(), start_values.end()),
      tick_count_(1),
      increment_(static_cast<std::size_t>(shape.dim())),
      segment_scratch_(shape) {
  if (static_cast<int>(start_values.size()) != shape.dim() - 1)
    throw std::invalid_argument("RunningSignature: start point needs dim-1 asset values");
  if (!std::isfinite(start_time))
    throw std::invalid_argument("RunningSignature: non-finite start time");
}

void RunningSignature::push(double time, std::span<const double> values) {
  if (values.size() != last_values_.size())
    throw std::invalid_argument("RunningSignature: tick dimension mismatch");
  if (!(time > last_time_))
    throw out_of_order_error("RunningSignature: tick time " + std::to_string(time) +
                             " not after " + std::to_string(last_time_));
  increment_[0] = time - last_time_;
  for (std::size_t a = 0; a < values.size(); ++a) increment_[a + 1] = values[a] - last_values_[a];
  segment_exp_into(segment_scratch_, increment_);
  // The GroupElement wrapper is bypassed on the hot path; the product of two
  // unit-scalar tensors keeps scalar == 1 exactly.
  TruncatedTensor t = std::move(sig_).tensor();
  multiply_inplace(t, segment_scratch_);
  sig_ = GroupElement(std::move(t));
  last_time_ = time;
  std::copy(values.begin(), values.end(), last_values_.begin());
  ++tick_count_;
}

RunningSignature update(const RunningSignature& rs, double time,
                        std::span<const double> values) {
  RunningSignature next = rs;
  next.push(time, values);
  return next;
}

TruncatedTensor sigswap_payoff(const GroupElement& realised, const TruncatedTensor& strike) {
  if (realised.shape() != strike.shape())
    throw shape_mismatch_error("sigswap_payoff: realised and strike shapes differ");
  TruncatedTensor out = realised.tensor();
  out -= strike;
  return out;
}

}  // namespace sigrisk
