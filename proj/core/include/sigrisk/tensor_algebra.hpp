#pragma once

// Dense truncated free tensor algebra T^(N)(R^d): storage, concatenation
// product, group inverse, exp/log, shuffle product, inner products, norms.
// All operations are pure functions on immutable values; nothing here keeps
// shared mutable state, so concurrent use from multiple threads is safe.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigrisk {

class shape_mismatch_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shape of the truncated algebra: number of channels d (including the time
// channel in production use) and truncation depth N. The flat coordinate
// count D = sum_{k=0..N} d^k is computed once at construction.
class AlgebraShape {
 public:
  AlgebraShape(int dim, int depth);

  int dim() const { return dim_; }
  int depth() const { return depth_; }

  std::size_t level_size(int level) const { return offsets_[level + 1] - offsets_[level]; }
  std::size_t level_offset(int level) const { return offsets_[level]; }
  std::size_t total_size() const { return offsets_.back(); }

  friend bool operator==(const AlgebraShape& a, const AlgebraShape& b) {
    return a.dim_ == b.dim_ && a.depth_ == b.depth_;
  }
  friend bool operator!=(const AlgebraShape& a, const AlgebraShape& b) { return !(a == b); }

 private:
  int dim_;
  int depth_;
  std::vector<std::size_t> offsets_;  // depth+2 entries; offsets_[k] = sum_{j<k} d^j
};

// A word over the alphabet {0..d-1}; the empty word addresses the scalar
// level. Flat index within its level is the base-d encoding with the
// leftmost letter most significant.
struct MultiIndex {
  std::vector<int> word;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> letters) : word(letters) {}
  explicit MultiIndex(std::vector<int> letters) : word(std::move(letters)) {}

  int length() const { return static_cast<int>(word.size()); }
  void validate(const AlgebraShape& shape) const;
  std::size_t level_index(const AlgebraShape& shape) const;  // index within level |word|
  std::size_t flat_index(const AlgebraShape& shape) const;   // index into the full D-vector

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.word == b.word; }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b);
};

// Element of T^(N)(R^d). Coordinates are stored in one contiguous buffer,
// level by level, so a full contraction is a single dot product over D
// doubles.
class TruncatedTensor {
 public:
  explicit TruncatedTensor(const AlgebraShape& shape)
      : shape_(shape), c_(shape.total_size(), 0.0) {}

  const AlgebraShape& shape() const { return shape_; }

  double scalar() const { return c_[0]; }
  void set_scalar(double v) { c_[0] = v; }

  std::span<double> flat() { return c_; }
  std::span<const double> flat() const { return c_; }

  std::span<double> level(int k) {
    return {c_.data() + shape_.level_offset(k), shape_.level_size(k)};
  }
  std::span<const double> level(int k) const {
    return {c_.data() + shape_.level_offset(k), shape_.level_size(k)};
  }

  double coeff(const MultiIndex& idx) const { return c_[idx.flat_index(shape_)]; }
  void set_coeff(const MultiIndex& idx, double v) { c_[idx.flat_index(shape_)] = v; }

  bool all_finite() const;

  TruncatedTensor& operator+=(const TruncatedTensor& o);
  TruncatedTensor& operator-=(const TruncatedTensor& o);
  TruncatedTensor& operator*=(double s);

  friend TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
  friend TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
  friend TruncatedTensor operator*(TruncatedTensor a, double s) { return a *= s; }
  friend TruncatedTensor operator*(double s, TruncatedTensor a) { return a *= s; }

 private:
  AlgebraShape shape_;
  std::vector<double> c_;
};

// Tensor with unit scalar level: path signatures, measure-bridge operators
// and stress perturbations live here. The constructor enforces the scalar
// invariant; product and inverse preserve it exactly.
class GroupElement {
 public:
  explicit GroupElement(TruncatedTensor t);

  const AlgebraShape& shape() const { return t_.shape(); }
  const TruncatedTensor& tensor() const& { return t_; }
  TruncatedTensor&& tensor() && { return std::move(t_); }

 private:
  TruncatedTensor t_;
};

GroupElement identity(const AlgebraShape& shape);

// a <- a (x) b, truncated at depth N. Runs top-down so lower levels of a can
// be consumed in place; no allocation.
void multiply_inplace(TruncatedTensor& a, const TruncatedTensor& b);

// out <- a (x) b. out must share the operand shape; overwritten entirely.
void tensor_product_into(TruncatedTensor& out, const TruncatedTensor& a,
                         const TruncatedTensor& b);

TruncatedTensor tensor_product(const TruncatedTensor& a, const TruncatedTensor& b);
GroupElement tensor_product(const GroupElement& a, const GroupElement& b);

// Inverse in the group of unit-scalar tensors, via the Neumann series on
// (g - 1). The series terminates at depth N, so the result is exact up to
// rounding; no iteration tolerance is involved.
GroupElement group_inverse(const GroupElement& g);

// exp of a tensor with zero scalar level; finite Horner sum by nilpotency.
GroupElement tensor_exp(const TruncatedTensor& x);

// exp of a pure level-1 increment; the signature of one linear segment.
// Cheaper than the general tensor_exp and used on the streaming hot path.
GroupElement segment_exp(const AlgebraShape& shape, std::span<const double> increment);
void segment_exp_into(TruncatedTensor& out, std::span<const double> increment);

// log of a unit-scalar tensor via the truncated Mercator series. Defined on
// all of {scalar == 1}, not just the group, which is what the tail-centroid
// projection needs.
TruncatedTensor tensor_log(const TruncatedTensor& t);
TruncatedTensor tensor_log(const GroupElement& g);

// All riffle interleavings of u and v with multiplicities. Unlike the
// algebra products, an overflowing shuffle (|u|+|v| > N) is an error rather
// than a silent truncation: the output lives in the dual space where
// dropped words change the identity being tested.
std::vector<std::pair<MultiIndex, long long>> shuffle_product(const MultiIndex& u,
                                                              const MultiIndex& v,
                                                              const AlgebraShape& shape);

// Full contraction <w, t>; cost exactly O(D).
double inner_product(const TruncatedTensor& w, const TruncatedTensor& t);

// l2 norm over all coordinates, level k scaled by level_weights[k] (all-ones
// when empty). Weights must be positive and cover levels 0..N.
double weighted_norm(const TruncatedTensor& t, std::span<const double> level_weights = {});

struct SquareMatrix {
  int n = 0;
  std::vector<double> a;  // row-major n*n

  SquareMatrix() = default;
  explicit SquareMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double frobenius_sq() const;
};

struct Level2Split {
  SquareMatrix sym;   // 1/2 (M + M^T)
  SquareMatrix anti;  // 1/2 (M - M^T); the Levy-area matrix
};

// Split the level-2 coordinate matrix into symmetric and anti-symmetric
// parts; sym + anti reconstructs the matrix exactly (plain additions).
Level2Split sym_anti_level2(const TruncatedTensor& t);

}  // namespace sigrisk
