#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sigrisk/market_models.hpp"
#include "sigrisk/rng.hpp"
#include "support/oracles.hpp"

using namespace sigrisk;
using testsupport::max_abs_diff;

namespace {

ModelSpec two_asset_spec() {
  ModelSpec spec;
  spec.n_assets = 2;
  spec.drift = {0.05, 0.02};
  spec.vol = {0.2, 0.3};
  spec.correlation = {1.0, 0.4, 0.4, 1.0};
  spec.horizon = 1.0;
  spec.steps = 32;
  spec.initial = {0.0, 0.0};
  return spec;
}

}  // namespace

TEST_CASE("model spec validation") {
  ModelSpec spec = two_asset_spec();
  CHECK_NOTHROW(spec.validate());

  ModelSpec bad = spec;
  bad.correlation = {1.0, 0.4, 0.5, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.correlation = {1.0, 1.5, 1.5, 1.0};  // symmetric but not PSD
  CHECK_THROWS_AS(generate_paths(bad, 1, 0), std::invalid_argument);

  bad = spec;
  bad.vol = {-0.1, 0.3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("degenerate diffusion: zero vol, zero drift, no jumps") {
  ModelSpec spec = two_asset_spec();
  spec.drift = {0.0, 0.0};
  spec.vol = {0.0, 0.0};
  spec.initial = {1.5, -0.5};
  const auto paths = generate_paths(spec, 4, 7);
  for (const auto& p : paths)
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p.row(i)[0] == 1.5);
      CHECK(p.row(i)[1] == -0.5);
    }

  // Every ensemble member identical; the expectation equals the member.
  const AlgebraShape shape(3, 3);
  const auto ens = build_ensemble(paths, shape);
  for (const auto& m : ens.members)
    CHECK(max_abs_diff(m.tensor(), ens.members.front().tensor()) == 0.0);
  CHECK(max_abs_diff(expected_signature(ens), ens.members.front().tensor()) == 0.0);
}

TEST_CASE("seed determinism and per-member substreams") {
  const ModelSpec spec = two_asset_spec();
  const auto a = generate_paths(spec, 300, 99);
  const auto b = generate_paths(spec, 300, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].values == b[i].values);
    CHECK(a[i].times == b[i].times);
  }
  // Member i depends on (seed, i) only, so a smaller batch is a prefix.
  const auto small = generate_paths(spec, 5, 99);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i].values == a[i].values);

  const auto c = generate_paths(spec, 5, 100);
  CHECK(c[0].values != a[0].values);
}

TEST_CASE("terminal log-return matches the GBM moment oracle") {
  ModelSpec spec;
  spec.n_assets = 1;
  spec.drift = {0.07};
  spec.vol = {0.25};
  spec.correlation = {1.0};
  spec.horizon = 1.0;
  spec.steps = 64;
  spec.initial = {0.0};
  const int n = 20000;
  const auto paths = generate_paths(spec, n, 2024);
  double mean = 0.0;
  for (const auto& p : paths) mean += p.row(p.size() - 1)[0];
  mean /= n;
  const double expected = (0.07 - 0.5 * 0.25 * 0.25) * spec.horizon;
  const double standard_error = 0.25 * std::sqrt(spec.horizon) / std::sqrt(double(n));
  CHECK(std::abs(mean - expected) < 3.0 * standard_error);
}

TEST_CASE("asset-mirrored twin cancels odd levels in the mean") {
  TimedPath up, down;
  up.n_assets = down.n_assets = 1;
  up.times = down.times = {0.0, 0.5, 1.0};
  up.values = {0.0, 0.3, 0.7};
  down.values = {0.0, -0.3, -0.7};
  const AlgebraShape shape(2, 3);
  const auto ens = build_ensemble({up, down}, shape);
  const TruncatedTensor mean = expected_signature(ens);
  // Level-1 asset coordinate cancels exactly; the time coordinate does not.
  CHECK(mean.level(1)[1] == 0.0);
  CHECK(mean.level(1)[0] == doctest::Approx(1.0));
}

TEST_CASE("driftless proxy: expected asset-asset level-2 coordinate is vol^2 T / 2") {
  ModelSpec spec;
  spec.n_assets = 1;
  const double sigma = 0.2;
  spec.vol = {sigma};
  spec.drift = {0.5 * sigma * sigma};  // kills the log-drift
  spec.correlation = {1.0};
  spec.horizon = 1.0;
  spec.steps = 32;
  spec.initial = {0.0};
  const int n = 20000;
  const auto ens = build_ensemble(generate_paths(spec, n, 5), AlgebraShape(2, 2));
  const TruncatedTensor mean = expected_signature(ens);
  const double coord = mean.coeff(MultiIndex{1, 1});
  const double target = 0.5 * sigma * sigma * spec.horizon;
  // Var(X^2/2) = sigma^4 T^2 / 2 for the diagonal coordinate.
  const double standard_error = sigma * sigma * spec.horizon / std::sqrt(2.0 * n);
  CHECK(std::abs(coord - target) < 4.0 * standard_error);
}

TEST_CASE("flows end at the terminal signature and interpolate exactly") {
  const ModelSpec spec = two_asset_spec();
  const auto paths = generate_paths(spec, 8, 3);
  const AlgebraShape shape(3, 3);
  std::vector<double> grid;
  for (int g = 1; g <= 8; ++g) grid.push_back(spec.horizon * g / 8.0);
  const auto ens = build_ensemble(paths, shape, grid);
  REQUIRE(ens.has_flows());
  for (std::size_t i = 0; i < ens.members.size(); ++i)
    CHECK(max_abs_diff(ens.flows[i].back().tensor(), ens.members[i].tensor()) == 0.0);

  // Off-grid-point prefix: equals the signature of the truncated path with an
  // interpolated endpoint.
  const double mid = spec.horizon * 0.37;
  const GroupElement pre = prefix_signature(paths[0], shape, mid);
  TimedPath cut;
  cut.n_assets = paths[0].n_assets;
  std::size_t m = 0;
  while (paths[0].times[m + 1] < mid) ++m;
  cut.times.assign(paths[0].times.begin(), paths[0].times.begin() + m + 1);
  cut.values.assign(paths[0].values.begin(),
                    paths[0].values.begin() + (m + 1) * static_cast<std::size_t>(cut.n_assets));
  const double frac = (mid - paths[0].times[m]) / (paths[0].times[m + 1] - paths[0].times[m]);
  cut.times.push_back(mid);
  for (int a = 0; a < cut.n_assets; ++a) {
    const double lo = paths[0].row(m)[a];
    const double hi = paths[0].row(m + 1)[a];
    cut.values.push_back(lo + frac * (hi - lo));
  }
  CHECK(max_abs_diff(pre.tensor(), compute_signature(cut, shape).tensor()) < 1e-12);
}

TEST_CASE("flow grid outside the horizon is rejected") {
  const ModelSpec spec = two_asset_spec();
  const auto paths = generate_paths(spec, 2, 1);
  CHECK_THROWS_AS(build_ensemble(paths, AlgebraShape(3, 2), {0.5, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(build_ensemble(paths, AlgebraShape(3, 2), {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("expected signature is linear under ensemble concatenation") {
  const ModelSpec spec = two_asset_spec();
  const AlgebraShape shape(3, 3);
  const auto paths_a = generate_paths(spec, 60, 11);
  const auto paths_b = generate_paths(spec, 140, 12);
  auto all = paths_a;
  all.insert(all.end(), paths_b.begin(), paths_b.end());

  const TruncatedTensor mean_a = expected_signature(build_ensemble(paths_a, shape));
  const TruncatedTensor mean_b = expected_signature(build_ensemble(paths_b, shape));
  const TruncatedTensor mean_all = expected_signature(build_ensemble(all, shape));

  TruncatedTensor blended = mean_a * (60.0 / 200.0) + mean_b * (140.0 / 200.0);
  auto fa = blended.flat();
  auto fb = mean_all.flat();
  for (std::size_t i = 0; i < fa.size(); ++i)
    CHECK(std::abs(fa[i] - fb[i]) <= 1e-12 * std::max({1.0, std::abs(fa[i]), std::abs(fb[i])}));
}

TEST_CASE("empty ensemble is rejected") {
  SignatureEnsemble ens{AlgebraShape(2, 2), {}, {}, {}, 0};
  CHECK_THROWS_AS(expected_signature(ens), std::invalid_argument);
  CHECK_THROWS_AS(generate_paths(two_asset_spec(), 0, 1), std::invalid_argument);
}

TEST_CASE("single constant path member is the pure time exponential") {
  ModelSpec spec;
  spec.n_assets = 1;
  spec.drift = {0.0};
  spec.vol = {0.0};
  spec.correlation = {1.0};
  spec.horizon = 2.0;
  spec.steps = 10;
  spec.initial = {0.4};
  const AlgebraShape shape(2, 2);
  const auto ens = build_ensemble(generate_paths(spec, 1, 0), shape);
  const TruncatedTensor& m = ens.members.front().tensor();
  CHECK(m.level(1)[0] == doctest::Approx(2.0));
  CHECK(m.level(1)[1] == 0.0);
  CHECK(m.coeff(MultiIndex{0, 0}) == doctest::Approx(2.0 * 2.0 / 2.0));
  CHECK(m.coeff(MultiIndex{1, 1}) == 0.0);
}

TEST_CASE("jumps move the terminal mean by the compensator") {
  ModelSpec spec;
  spec.n_assets = 1;
  spec.drift = {0.0};
  spec.vol = {0.05};
  spec.correlation = {1.0};
  spec.jump_intensity = 5.0;
  spec.jump_mean = -0.02;
  spec.jump_std = 0.01;
  spec.horizon = 1.0;
  spec.steps = 50;
  spec.initial = {0.0};
  const int n = 20000;
  const auto paths = generate_paths(spec, n, 31);
  double mean = 0.0;
  for (const auto& p : paths) mean += p.row(p.size() - 1)[0];
  mean /= n;
  const double expected = (0.0 - 0.5 * 0.05 * 0.05) + 5.0 * (-0.02);
  // Terminal variance is diffusion plus jump contribution.
  const double var = 0.05 * 0.05 + 5.0 * (0.02 * 0.02 + 0.01 * 0.01);
  CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(var / n));
}
