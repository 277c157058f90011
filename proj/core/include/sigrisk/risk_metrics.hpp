#pragma once

// Portfolio loss functional, geometric tail-set analysis (S-VaR / S-ES via
// the tail-conditional expected signature), Levy-area gap indicator,
// temporal exposure profile and path-wise solvency.

#include <cstddef>
#include <string>
#include <vector>

#include "sigrisk/market_models.hpp"
#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

// Signature weight tensor w plus initial value V0; the dual-space object
// priced against expected signatures.
struct PortfolioSpec {
  TruncatedTensor weights;
  double initial_value = 0.0;
  std::string label;

  PortfolioSpec(TruncatedTensor w, double v0, std::string name = {})
      : weights(std::move(w)), initial_value(v0), label(std::move(name)) {}
};

struct TailResult {
  double alpha = 0.0;
  std::size_t tail_count = 0;
  double s_var = 0.0;
  double s_es = 0.0;
  TruncatedTensor tail_signature;
  std::vector<std::size_t> tail_indices;  // loss-descending, ties by ascending index
  double tail_levy_share = 0.0;           // anti-symmetric fraction of level-2 Frobenius mass

  explicit TailResult(const AlgebraShape& shape) : tail_signature(shape) {}
};

struct TEPResult {
  std::vector<double> grid;
  std::vector<double> values;  // <w, mean flow at s> per grid point
  double min_value = 0.0;
  double solvency_prob = 1.0;
};

// L(S) = V0 - <w, S>.
double loss(const PortfolioSpec& portfolio, const GroupElement& sig);
double loss(const PortfolioSpec& portfolio, const TruncatedTensor& sig);

// Empirical geometric tail-set analysis. Losses are sorted descending with
// ties broken by ascending member index; the tail holds the worst
// floor(N(1-alpha)) members (at least one). S-ES is computed both as the
// direct tail-loss mean and through V0 - <w, tail signature>; disagreement
// beyond 1e-9 relative aborts rather than returning a silently wrong number.
TailResult tail_analysis(const PortfolioSpec& portfolio, const SignatureEnsemble& ens,
                         double alpha);

// ||Anti||_F^2 - ||Sym||_F^2 of the level-2 asset block. The leading time
// channel is excluded by default; pass time_channel = false for raw fixtures
// without one (time-asset areas measure drift asymmetry, not cross-winding).
double levy_gap_indicator(const TruncatedTensor& t, bool time_channel = true);

// Temporal exposure profile: expectation first, then contraction. The
// optional threshold fills solvency_prob with the fraction of members whose
// own value path stays at or above it.
TEPResult tep(const PortfolioSpec& portfolio, const SignatureEnsemble& ens);
TEPResult tep(const PortfolioSpec& portfolio, const SignatureEnsemble& ens, double threshold);

struct SolvencyResult {
  double prob = 0.0;
  bool pass = false;
};

// Per-member minima against the threshold: a member solvent at the horizon
// but dipping below Z at an intermediate grid point counts as insolvent.
SolvencyResult pathwise_solvency(const PortfolioSpec& portfolio, const SignatureEnsemble& ens,
                                 double threshold, double epsilon);

}  // namespace sigrisk
