#pragma once

// Parametric Monte-Carlo generator for the physical-measure signature
// ensemble: correlated log-price diffusion with compound-Poisson log-normal
// jumps on a uniform grid, plus ensemble construction (terminal signatures
// and optional intermediate-horizon flows) and the empirical expected
// signature.

#include <cstdint>
#include <optional>
#include <vector>

#include "sigrisk/path_signature.hpp"
#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

struct ModelSpec {
  int n_assets = 1;
  std::vector<double> drift;        // per-year, per asset
  std::vector<double> vol;          // per-sqrt(year), per asset
  std::vector<double> correlation;  // row-major n x n, unit diagonal, PSD
  double jump_intensity = 0.0;      // market-wide events per year
  double jump_mean = 0.0;           // log-jump size mean
  double jump_std = 0.0;            // log-jump size stddev
  double horizon = 1.0;             // years
  int steps = 252;
  std::vector<double> initial;      // initial log-prices

  void validate() const;
};

// N sampled signatures under the physical measure; flows, when present, are
// prefix signatures on flow_grid and end at the member's terminal signature
// when the grid ends at the horizon.
struct SignatureEnsemble {
  AlgebraShape shape;
  std::vector<GroupElement> members;
  std::vector<double> flow_grid;                       // empty when no flows
  std::vector<std::vector<GroupElement>> flows;        // members x grid
  std::uint64_t seed = 0;

  bool has_flows() const { return !flow_grid.empty(); }
};

// n correlated jump-diffusion log-price paths on the spec's uniform grid.
// Deterministic for fixed (spec, n, seed); member i depends only on
// (seed, i), so chunked parallel generation agrees with the serial run.
std::vector<TimedPath> generate_paths(const ModelSpec& spec, int n, std::uint64_t seed);

// Signatures (and optional prefix-signature flows) of a batch of paths.
// Grid times outside the common path horizon are an error.
SignatureEnsemble build_ensemble(const std::vector<TimedPath>& paths, const AlgebraShape& shape,
                                 const std::vector<double>& flow_grid = {},
                                 std::uint64_t seed = 0);

// Coordinatewise mean of the members. Note the mean of group-like elements
// keeps the unit scalar but is not itself group-like in general.
TruncatedTensor expected_signature(const SignatureEnsemble& ens);

// Mean of the members' flow tensors at one grid index.
TruncatedTensor mean_flow(const SignatureEnsemble& ens, std::size_t grid_index);

// Prefix signature of a piecewise-linear path up to an arbitrary time inside
// its span (partial final segment handled exactly).
GroupElement prefix_signature(const TimedPath& path, const AlgebraShape& shape, double up_to);

}  // namespace sigrisk
