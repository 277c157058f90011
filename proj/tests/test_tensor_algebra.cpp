#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "sigrisk/path_signature.hpp"
#include "sigrisk/rng.hpp"
#include "sigrisk/tensor_algebra.hpp"
#include "support/oracles.hpp"

using namespace sigrisk;
using testsupport::max_abs_diff;

namespace {

GroupElement random_group_element(CounterRng& rng, const AlgebraShape& shape) {
  TruncatedTensor x = testsupport::random_tensor(rng, shape, 0.5);
  x.set_scalar(0.0);
  return tensor_exp(x);
}

}  // namespace

TEST_CASE("shape bookkeeping") {
  AlgebraShape shape(2, 3);
  CHECK(shape.total_size() == 1 + 2 + 4 + 8);
  CHECK(shape.level_offset(0) == 0);
  CHECK(shape.level_offset(2) == 3);
  CHECK(shape.level_size(3) == 8);
  CHECK_THROWS_AS(AlgebraShape(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(AlgebraShape(2, 0), std::invalid_argument);
}

TEST_CASE("multi-index encodes base-d words, leftmost most significant") {
  AlgebraShape shape(3, 3);
  CHECK(MultiIndex{}.flat_index(shape) == 0);
  CHECK(MultiIndex{1}.flat_index(shape) == shape.level_offset(1) + 1);
  CHECK(MultiIndex{1, 2}.flat_index(shape) == shape.level_offset(2) + 1 * 3 + 2);
  CHECK(MultiIndex{2, 0, 1}.flat_index(shape) == shape.level_offset(3) + 2 * 9 + 0 * 3 + 1);
  CHECK_THROWS_AS(MultiIndex({0, 0, 0, 0}).flat_index(shape), std::invalid_argument);
  CHECK_THROWS_AS(MultiIndex{3}.flat_index(shape), std::invalid_argument);
}

TEST_CASE("identity is the algebra unit") {
  AlgebraShape shape(2, 2);
  const GroupElement id = identity(shape);
  CHECK(id.tensor().scalar() == 1.0);
  for (int k = 1; k <= 2; ++k)
    for (double v : id.tensor().level(k)) CHECK(v == 0.0);

  CounterRng rng(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const GroupElement g = random_group_element(rng, shape);
    CHECK(max_abs_diff(tensor_product(id, g).tensor(), g.tensor()) == 0.0);
    CHECK(max_abs_diff(tensor_product(g, id).tensor(), g.tensor()) == 0.0);
  }
  CHECK(max_abs_diff(group_inverse(id).tensor(), id.tensor()) == 0.0);
}

TEST_CASE("product of level-1 tensors is forced by bilinearity") {
  AlgebraShape shape(2, 2);
  TruncatedTensor a(shape), b(shape);
  const double u[2] = {2.0, -1.0};
  const double v[2] = {0.5, 3.0};
  for (int i = 0; i < 2; ++i) {
    a.level(1)[static_cast<std::size_t>(i)] = u[i];
    b.level(1)[static_cast<std::size_t>(i)] = v[i];
  }
  const TruncatedTensor p = tensor_product(a, b);
  CHECK(p.scalar() == 0.0);
  for (double lv : p.level(1)) CHECK(lv == 0.0);  // zero scalars kill level 1
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(p.level(2)[static_cast<std::size_t>(i * 2 + j)] == doctest::Approx(u[i] * v[j]));

  // With unit scalars the level-1 parts add as well.
  a.set_scalar(1.0);
  b.set_scalar(1.0);
  const TruncatedTensor q = tensor_product(a, b);
  for (int i = 0; i < 2; ++i)
    CHECK(q.level(1)[static_cast<std::size_t>(i)] == doctest::Approx(u[i] + v[i]));
}

TEST_CASE("Chen identity: split signatures concatenate to the full one") {
  CounterRng rng(42, 0);
  AlgebraShape shape(3, 4);
  const auto points = testsupport::random_raw_path(rng, 3, 50, 0.3);
  const GroupElement full = compute_signature_raw(points, shape);
  for (std::size_t split : {10u, 25u, 40u}) {
    testsupport::Points left(points.begin(), points.begin() + split + 1);
    testsupport::Points right(points.begin() + split, points.end());
    const GroupElement glued =
        tensor_product(compute_signature_raw(left, shape), compute_signature_raw(right, shape));
    CHECK(max_abs_diff(glued.tensor(), full.tensor()) < 1e-10);
  }
}

TEST_CASE("tensor product is associative") {
  CounterRng rng(7, 0);
  AlgebraShape shape(2, 4);
  for (int rep = 0; rep < 50; ++rep) {
    const TruncatedTensor a = testsupport::random_tensor(rng, shape);
    const TruncatedTensor b = testsupport::random_tensor(rng, shape);
    const TruncatedTensor c = testsupport::random_tensor(rng, shape);
    const TruncatedTensor lhs = tensor_product(tensor_product(a, b), c);
    const TruncatedTensor rhs = tensor_product(a, tensor_product(b, c));
    auto fl = lhs.flat();
    auto fr = rhs.flat();
    for (std::size_t i = 0; i < fl.size(); ++i)
      CHECK(std::abs(fl[i] - fr[i]) <=
            1e-12 * std::max({1.0, std::abs(fl[i]), std::abs(fr[i])}));
  }
}

TEST_CASE("group inverse via Neumann series is exact at depth") {
  CounterRng rng(3, 0);
  AlgebraShape shape(3, 4);
  const GroupElement id = identity(shape);
  for (int rep = 0; rep < 30; ++rep) {
    const auto points = testsupport::random_raw_path(rng, 3, 20, 0.4);
    const GroupElement sig = compute_signature_raw(points, shape);
    const GroupElement inv = group_inverse(sig);
    CHECK(tensor_product(sig, inv).tensor().scalar() == 1.0);
    CHECK(max_abs_diff(tensor_product(sig, inv).tensor(), id.tensor()) < 1e-10);
    CHECK(max_abs_diff(tensor_product(inv, sig).tensor(), id.tensor()) < 1e-10);
  }
}

TEST_CASE("inverse equals the time-reversed signature at level 1") {
  CounterRng rng(5, 0);
  AlgebraShape shape(2, 3);
  const auto points = testsupport::random_raw_path(rng, 2, 15, 0.5);
  auto reversed = points;
  std::reverse(reversed.begin(), reversed.end());
  const GroupElement inv = group_inverse(compute_signature_raw(points, shape));
  const GroupElement rev = compute_signature_raw(reversed, shape);
  auto li = inv.tensor().level(1);
  auto lr = rev.tensor().level(1);
  for (std::size_t i = 0; i < li.size(); ++i) CHECK(li[i] == doctest::Approx(lr[i]));
}

TEST_CASE("tensor_exp of zero and of a 1-d increment") {
  AlgebraShape shape1(1, 3);
  const TruncatedTensor zero(AlgebraShape(2, 2));
  CHECK(max_abs_diff(tensor_exp(zero).tensor(), identity(AlgebraShape(2, 2)).tensor()) == 0.0);

  const double v = 0.7;
  TruncatedTensor x(shape1);
  x.level(1)[0] = v;
  const GroupElement e = tensor_exp(x);
  CHECK(e.tensor().scalar() == 1.0);
  CHECK(e.tensor().level(1)[0] == doctest::Approx(v));
  CHECK(e.tensor().level(2)[0] == doctest::Approx(v * v / 2.0));
  CHECK(e.tensor().level(3)[0] == doctest::Approx(v * v * v / 6.0));

  TruncatedTensor bad(shape1);
  bad.set_scalar(0.5);
  CHECK_THROWS_AS(tensor_exp(bad), std::invalid_argument);
}

TEST_CASE("segment_exp agrees with the general exponential") {
  CounterRng rng(9, 0);
  AlgebraShape shape(3, 4);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> inc(3);
    for (double& c : inc) c = rng.next_normal();
    TruncatedTensor x(shape);
    auto l1 = x.level(1);
    std::copy(inc.begin(), inc.end(), l1.begin());
    CHECK(max_abs_diff(segment_exp(shape, inc).tensor(), tensor_exp(x).tensor()) < 1e-14);
  }
}

TEST_CASE("exp and log are mutually inverse") {
  CounterRng rng(13, 0);
  AlgebraShape shape(2, 4);
  CHECK(weighted_norm(tensor_log(identity(shape))) == 0.0);

  for (int rep = 0; rep < 50; ++rep) {
    TruncatedTensor x = testsupport::random_tensor(rng, shape, 0.6);
    x.set_scalar(0.0);
    const TruncatedTensor back = tensor_log(tensor_exp(x));
    CHECK(max_abs_diff(back, x) < 1e-10);
  }
  for (int rep = 0; rep < 50; ++rep) {
    const GroupElement g = random_group_element(rng, shape);
    const GroupElement back = tensor_exp(tensor_log(g));
    CHECK(max_abs_diff(back.tensor(), g.tensor()) < 1e-10);
  }
}

TEST_CASE("log of exp of a pure anti-symmetric level-2 generator") {
  AlgebraShape shape(2, 4);
  const double a = 0.8;
  TruncatedTensor gen(shape);
  gen.set_coeff(MultiIndex{0, 1}, a);
  gen.set_coeff(MultiIndex{1, 0}, -a);
  const TruncatedTensor back = tensor_log(tensor_exp(gen));
  CHECK(max_abs_diff(back, gen) < 1e-12);
}

TEST_CASE("shuffle product enumerates riffles with multiplicities") {
  AlgebraShape shape(3, 4);
  auto result = shuffle_product(MultiIndex{1}, MultiIndex{2}, shape);
  std::map<std::vector<int>, long long> as_map;
  for (auto& [idx, mult] : result) as_map[idx.word] = mult;
  CHECK(as_map.size() == 2);
  CHECK(as_map[{1, 2}] == 1);
  CHECK(as_map[{2, 1}] == 1);

  result = shuffle_product(MultiIndex{1}, MultiIndex{1}, shape);
  CHECK(result.size() == 1);
  CHECK(result[0].first.word == std::vector<int>{1, 1});
  CHECK(result[0].second == 2);

  // Total multiplicity is the binomial coefficient.
  result = shuffle_product(MultiIndex{0, 1}, MultiIndex{1, 2}, shape);
  long long total = 0;
  for (auto& [idx, mult] : result) total += mult;
  CHECK(total == 6);  // C(4, 2)

  CHECK_THROWS_AS(shuffle_product(MultiIndex{0, 1, 2}, MultiIndex{0, 1}, shape),
                  std::invalid_argument);
}

TEST_CASE("shuffle identity holds on signatures of random paths") {
  CounterRng rng(21, 0);
  AlgebraShape shape(3, 4);
  for (int rep = 0; rep < 25; ++rep) {
    const auto points = testsupport::random_raw_path(rng, 3, 12, 0.4);
    const GroupElement sig = compute_signature_raw(points, shape);
    const std::vector<std::pair<MultiIndex, MultiIndex>> cases = {
        {MultiIndex{0}, MultiIndex{1}},
        {MultiIndex{2}, MultiIndex{2}},
        {MultiIndex{0, 1}, MultiIndex{2}},
        {MultiIndex{1}, MultiIndex{1, 2}},
        {MultiIndex{0, 1}, MultiIndex{2, 0}},
    };
    for (const auto& [u, v] : cases) {
      const double lhs = sig.tensor().coeff(u) * sig.tensor().coeff(v);
      double rhs = 0.0;
      for (auto& [word, mult] : shuffle_product(u, v, shape))
        rhs += static_cast<double>(mult) * sig.tensor().coeff(word);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
}

TEST_CASE("inner product basics") {
  AlgebraShape shape(2, 3);
  CounterRng rng(17, 0);
  const TruncatedTensor zero(shape);
  const GroupElement g = random_group_element(rng, shape);
  CHECK(inner_product(g.tensor(), zero) == 0.0);
  CHECK(inner_product(identity(shape).tensor(), g.tensor()) == 1.0);

  AlgebraShape line(1, 2);
  const auto points = testsupport::random_raw_path(rng, 1, 30, 0.7);
  const GroupElement sig = compute_signature_raw(points, line);
  TruncatedTensor e0(line);
  e0.set_coeff(MultiIndex{0}, 1.0);
  CHECK(inner_product(e0, sig.tensor()) ==
        doctest::Approx(points.back()[0] - points.front()[0]).epsilon(1e-12));

  TruncatedTensor other(AlgebraShape(2, 2));
  CHECK_THROWS_AS(inner_product(e0, other), shape_mismatch_error);
}

TEST_CASE("weighted norm") {
  AlgebraShape shape(2, 2);
  CHECK(weighted_norm(TruncatedTensor(shape)) == 0.0);
  CHECK(weighted_norm(identity(shape).tensor()) == 1.0);

  CounterRng rng(23, 0);
  const std::vector<double> weights = {1.0, 2.0, 0.5};
  for (int rep = 0; rep < 40; ++rep) {
    const TruncatedTensor a = testsupport::random_tensor(rng, shape);
    const TruncatedTensor b = testsupport::random_tensor(rng, shape);
    CHECK(weighted_norm(a + b, weights) <=
          weighted_norm(a, weights) + weighted_norm(b, weights) + 1e-12);
  }
  const std::vector<double> bad = {1.0, 0.0, 1.0};
  CHECK_THROWS_AS(weighted_norm(identity(shape).tensor(), bad), std::invalid_argument);
}

TEST_CASE("sym/anti split of level 2") {
  AlgebraShape shape(2, 2);

  // Symmetric input: anti part vanishes.
  TruncatedTensor sym_only(shape);
  sym_only.set_coeff(MultiIndex{0, 0}, 2.0);
  sym_only.set_coeff(MultiIndex{0, 1}, 3.0);
  sym_only.set_coeff(MultiIndex{1, 0}, 3.0);
  sym_only.set_coeff(MultiIndex{1, 1}, -1.0);
  const Level2Split s = sym_anti_level2(sym_only);
  CHECK(s.anti.frobenius_sq() == 0.0);
  CHECK(s.sym(0, 1) == 3.0);

  // Unit square, counter-clockwise: level 1 zero, Levy area exactly the
  // Green's-theorem enclosed area.
  const auto square = testsupport::unit_square_ccw();
  const GroupElement sig = compute_signature_raw(square, shape);
  for (double v : sig.tensor().level(1)) CHECK(std::abs(v) < 1e-15);
  const Level2Split split = sym_anti_level2(sig.tensor());
  const double area = testsupport::polygon_area(square);
  CHECK(area == doctest::Approx(1.0));
  CHECK(split.anti(0, 1) == doctest::Approx(area).epsilon(1e-12));
  CHECK(split.anti(1, 0) == doctest::Approx(-area).epsilon(1e-12));
  CHECK(split.sym.frobenius_sq() == doctest::Approx(0.0));

  // Reconstruction is exact, and 1-d paths have no area.
  auto l2 = sig.tensor().level(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(split.sym(i, j) + split.anti(i, j) == l2[static_cast<std::size_t>(i * 2 + j)]);

  CounterRng rng(31, 0);
  AlgebraShape line(1, 2);
  const auto pts = testsupport::random_raw_path(rng, 1, 10);
  const Level2Split line_split = sym_anti_level2(compute_signature_raw(pts, line).tensor());
  CHECK(line_split.anti.frobenius_sq() == 0.0);

  CHECK_THROWS_AS(sym_anti_level2(TruncatedTensor(AlgebraShape(2, 1))), std::invalid_argument);
}

TEST_CASE("level-2 coordinates match the direct integral oracle") {
  CounterRng rng(37, 0);
  AlgebraShape shape(3, 2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto points = testsupport::random_raw_path(rng, 3, 25, 0.5);
    const GroupElement sig = compute_signature_raw(points, shape);
    const auto oracle = testsupport::direct_level2(points);
    auto l2 = sig.tensor().level(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(l2[static_cast<std::size_t>(i * 3 + j)] ==
              doctest::Approx(oracle[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                  .epsilon(1e-10));
  }
}
