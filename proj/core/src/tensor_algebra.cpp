#include "sigrisk/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sigrisk {

namespace {

[[noreturn]] void throw_shape_mismatch(const char* op) {
  throw shape_mismatch_error(std::string("tensor shape mismatch in ") + op);
}

void require_same_shape(const TruncatedTensor& a, const TruncatedTensor& b, const char* op) {
  if (a.shape() != b.shape()) throw_shape_mismatch(op);
}

}  // namespace

AlgebraShape::AlgebraShape(int dim, int depth) : dim_(dim), depth_(depth) {
  if (dim < 1) throw std::invalid_argument("AlgebraShape: dim must be >= 1");
  if (depth < 1) throw std::invalid_argument("AlgebraShape: depth must be >= 1");
  offsets_.resize(static_cast<std::size_t>(depth) + 2);
  offsets_[0] = 0;
  std::size_t level_size = 1;
  for (int k = 0; k <= depth; ++k) {
    if (level_size > (std::numeric_limits<std::size_t>::max() - offsets_[k]) ||
        offsets_[k] + level_size > (std::size_t{1} << 31)) {
      throw std::invalid_argument("AlgebraShape: coordinate count overflows practical limits");
    }
    offsets_[k + 1] = offsets_[k] + level_size;
    level_size *= static_cast<std::size_t>(dim);
  }
}

void MultiIndex::validate(const AlgebraShape& shape) const {
  if (length() > shape.depth())
    throw std::invalid_argument("MultiIndex: word longer than truncation depth");
  for (int letter : word)
    if (letter < 0 || letter >= shape.dim())
      throw std::invalid_argument("MultiIndex: letter out of range");
}

std::size_t MultiIndex::level_index(const AlgebraShape& shape) const {
  validate(shape);
  std::size_t idx = 0;
  for (int letter : word) idx = idx * static_cast<std::size_t>(shape.dim()) + letter;
  return idx;
}

std::size_t MultiIndex::flat_index(const AlgebraShape& shape) const {
  return shape.level_offset(length()) + level_index(shape);
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
  if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
  return a.word < b.word;
}

bool TruncatedTensor::all_finite() const {
  for (double v : c_)
    if (!std::isfinite(v)) return false;
  return true;
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

GroupElement::GroupElement(TruncatedTensor t) : t_(std::move(t)) {
  if (t_.scalar() != 1.0)
    throw std::invalid_argument("GroupElement: scalar level must equal 1 exactly");
}

GroupElement identity(const AlgebraShape& shape) {
  TruncatedTensor t(shape);
  t.set_scalar(1.0);
  return GroupElement(std::move(t));
}

void multiply_inplace(TruncatedTensor& a, const TruncatedTensor& b) {
  require_same_shape(a, b, "multiply_inplace");
  const int depth = a.shape().depth();
  const double a0 = a.scalar();
  const double b0 = b.scalar();
  // Level k of the product reads levels < k of a, so walk top-down and the
  // in-place update never consumes an already-overwritten block.
  for (int k = depth; k >= 1; --k) {
    auto ak = a.level(k);
    if (b0 != 1.0)
      for (double& v : ak) v *= b0;
    for (int i = 1; i < k; ++i) {
      auto ai = a.level(i);
      auto bj = b.level(k - i);
      std::size_t out = 0;
      for (double av : ai) {
        for (double bv : bj) ak[out++] += av * bv;
      }
    }
    auto bk = b.level(k);
    if (a0 == 1.0) {
      for (std::size_t q = 0; q < bk.size(); ++q) ak[q] += bk[q];
    } else if (a0 != 0.0) {
      for (std::size_t q = 0; q < bk.size(); ++q) ak[q] += a0 * bk[q];
    }
  }
  a.set_scalar(a0 * b0);
}

void tensor_product_into(TruncatedTensor& out, const TruncatedTensor& a,
                         const TruncatedTensor& b) {
  require_same_shape(a, b, "tensor_product");
  require_same_shape(out, a, "tensor_product");
  std::fill(out.flat().begin(), out.flat().end(), 0.0);
  const int depth = a.shape().depth();
  out.set_scalar(a.scalar() * b.scalar());
  for (int k = 1; k <= depth; ++k) {
    auto ok = out.level(k);
    for (int i = 0; i <= k; ++i) {
      auto ai = a.level(i);
      auto bj = b.level(k - i);
      std::size_t pos = 0;
      for (double av : ai) {
        if (av == 0.0) {
          pos += bj.size();
          continue;
        }
        for (double bv : bj) ok[pos++] += av * bv;
      }
    }
  }
}

TruncatedTensor tensor_product(const TruncatedTensor& a, const TruncatedTensor& b) {
  TruncatedTensor out(a.shape());
  tensor_product_into(out, a, b);
  return out;
}

GroupElement tensor_product(const GroupElement& a, const GroupElement& b) {
  return GroupElement(tensor_product(a.tensor(), b.tensor()));
}

GroupElement group_inverse(const GroupElement& g) {
  const AlgebraShape& shape = g.shape();
  TruncatedTensor x = g.tensor();  // x = g - 1
  x.set_scalar(0.0);
  TruncatedTensor unit(shape);
  unit.set_scalar(1.0);
  // inv = 1 - x + x^2 - ... +- x^N, evaluated as acc = 1 - x (x) acc.
  TruncatedTensor acc = unit;
  TruncatedTensor tmp(shape);
  for (int it = 0; it < shape.depth(); ++it) {
    tensor_product_into(tmp, x, acc);
    acc = unit;
    acc -= tmp;
  }
  acc.set_scalar(1.0);
  return GroupElement(std::move(acc));
}

GroupElement tensor_exp(const TruncatedTensor& x) {
  if (x.scalar() != 0.0)
    throw std::invalid_argument("tensor_exp: scalar level must be zero");
  const AlgebraShape& shape = x.shape();
  TruncatedTensor unit(shape);
  unit.set_scalar(1.0);
  // exp(x) = 1 + x(1 + x/2 (1 + x/3 (...))), exact by nilpotency.
  TruncatedTensor acc = unit;
  TruncatedTensor tmp(shape);
  for (int k = shape.depth(); k >= 1; --k) {
    tensor_product_into(tmp, x, acc);
    tmp *= 1.0 / static_cast<double>(k);
    acc = unit;
    acc += tmp;
  }
  acc.set_scalar(1.0);
  return GroupElement(std::move(acc));
}

void segment_exp_into(TruncatedTensor& out, std::span<const double> increment) {
  const AlgebraShape& shape = out.shape();
  if (static_cast<int>(increment.size()) != shape.dim())
    throw std::invalid_argument("segment_exp: increment size must equal dim");
  std::fill(out.flat().begin(), out.flat().end(), 0.0);
  out.set_scalar(1.0);
  auto l1 = out.level(1);
  std::copy(increment.begin(), increment.end(), l1.begin());
  for (int k = 2; k <= shape.depth(); ++k) {
    auto prev = out.level(k - 1);
    auto cur = out.level(k);
    const double inv_k = 1.0 / static_cast<double>(k);
    std::size_t pos = 0;
    for (double pv : prev) {
      const double scaled = pv * inv_k;
      for (double iv : increment) cur[pos++] = scaled * iv;
    }
  }
}

GroupElement segment_exp(const AlgebraShape& shape, std::span<const double> increment) {
  TruncatedTensor out(shape);
  segment_exp_into(out, increment);
  return GroupElement(std::move(out));
}

TruncatedTensor tensor_log(const TruncatedTensor& t) {
  if (t.scalar() != 1.0)
    throw std::invalid_argument("tensor_log: scalar level must equal 1");
  const AlgebraShape& shape = t.shape();
  TruncatedTensor z = t;  // z = t - 1
  z.set_scalar(0.0);
  // log(1+z) = z - z^2/2 + z^3/3 - ..., terminating at depth N.
  TruncatedTensor result = z;
  TruncatedTensor power = z;
  TruncatedTensor tmp(shape);
  double sign = -1.0;
  for (int k = 2; k <= shape.depth(); ++k) {
    tensor_product_into(tmp, power, z);
    std::swap(power, tmp);
    TruncatedTensor term = power;
    term *= sign / static_cast<double>(k);
    result += term;
    sign = -sign;
  }
  result.set_scalar(0.0);
  return result;
}

TruncatedTensor tensor_log(const GroupElement& g) { return tensor_log(g.tensor()); }

namespace {

void shuffle_recurse(std::span<const int> u, std::span<const int> v, std::vector<int>& prefix,
                     std::map<std::vector<int>, long long>& out) {
  if (u.empty() && v.empty()) {
    ++out[prefix];
    return;
  }
  if (!u.empty()) {
    prefix.push_back(u[0]);
    shuffle_recurse(u.subspan(1), v, prefix, out);
    prefix.pop_back();
  }
  if (!v.empty()) {
    prefix.push_back(v[0]);
    shuffle_recurse(u, v.subspan(1), prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::pair<MultiIndex, long long>> shuffle_product(const MultiIndex& u,
                                                              const MultiIndex& v,
                                                              const AlgebraShape& shape) {
  for (int letter : u.word)
    if (letter < 0 || letter >= shape.dim())
      throw std::invalid_argument("shuffle_product: letter out of range");
  for (int letter : v.word)
    if (letter < 0 || letter >= shape.dim())
      throw std::invalid_argument("shuffle_product: letter out of range");
  if (u.length() + v.length() > shape.depth())
    throw std::invalid_argument(
        "shuffle_product: combined word length exceeds truncation depth");
  std::map<std::vector<int>, long long> acc;
  std::vector<int> prefix;
  prefix.reserve(u.word.size() + v.word.size());
  shuffle_recurse(u.word, v.word, prefix, acc);
  std::vector<std::pair<MultiIndex, long long>> out;
  out.reserve(acc.size());
  for (auto& [word, mult] : acc) out.emplace_back(MultiIndex(word), mult);
  return out;
}

double inner_product(const TruncatedTensor& w, const TruncatedTensor& t) {
  require_same_shape(w, t, "inner_product");
  auto wf = w.flat();
  auto tf = t.flat();
  double acc = 0.0;
  for (std::size_t i = 0; i < wf.size(); ++i) acc += wf[i] * tf[i];
  return acc;
}

double weighted_norm(const TruncatedTensor& t, std::span<const double> level_weights) {
  const AlgebraShape& shape = t.shape();
  if (level_weights.empty()) {
    double acc = 0.0;
    for (double v : t.flat()) acc += v * v;
    return std::sqrt(acc);
  }
  if (static_cast<int>(level_weights.size()) != shape.depth() + 1)
    throw std::invalid_argument("weighted_norm: need one weight per level 0..N");
  for (double w : level_weights)
    if (!(w > 0.0)) throw std::invalid_argument("weighted_norm: level weights must be positive");
  double acc = 0.0;
  for (int k = 0; k <= shape.depth(); ++k) {
    const double w2 = level_weights[k] * level_weights[k];
    double lvl = 0.0;
    for (double v : t.level(k)) lvl += v * v;
    acc += w2 * lvl;
  }
  return std::sqrt(acc);
}

double SquareMatrix::frobenius_sq() const {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

Level2Split sym_anti_level2(const TruncatedTensor& t) {
  const AlgebraShape& shape = t.shape();
  if (shape.depth() < 2)
    throw std::invalid_argument("sym_anti_level2: depth must be at least 2");
  const int d = shape.dim();
  auto l2 = t.level(2);
  Level2Split split{SquareMatrix(d), SquareMatrix(d)};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double mij = l2[static_cast<std::size_t>(i) * d + j];
      const double mji = l2[static_cast<std::size_t>(j) * d + i];
      split.sym(i, j) = 0.5 * (mij + mji);
      split.anti(i, j) = 0.5 * (mij - mji);
    }
  }
  return split;
}

}  // namespace sigrisk
