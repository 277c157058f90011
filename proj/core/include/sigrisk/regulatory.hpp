#pragma once

// FRTB-facing computations: least-squares projection of exotic payoffs onto
// the signature basis (the RRAO-mitigation route), P&L-attribution test
// statistics, geometric delta, weighted-sensitivity capital charge and the
// signature-neutral hedge.

#include <optional>
#include <vector>

#include "sigrisk/risk_metrics.hpp"
#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

struct PayoffFit {
  TruncatedTensor weights;               // levels above depth_used are zero
  int depth_used = 0;
  double in_sample_rmse = 0.0;
  std::vector<double> residual_by_depth;  // rmse after fitting levels 0..k, k = 1..depth_used
  bool ridge_engaged = false;

  explicit PayoffFit(const AlgebraShape& shape) : weights(shape) {}
};

// Nested least squares on signature coordinates of levels 0..depth. With
// fewer samples than coordinates (or a numerically degenerate design) a
// ridge term lambda * trace(X^T X)/cols is added; otherwise the plain
// normal equations are solved.
PayoffFit fit_payoff_weights(const std::vector<double>& payoffs,
                             const std::vector<GroupElement>& sigs, int depth,
                             double ridge_lambda = 1e-8);

// Gradient of the portfolio value with respect to the expected signature.
// Exact by linearity: the weight tensor itself.
TruncatedTensor geometric_delta(const PortfolioSpec& portfolio);

// Hedge weights: -w restricted to levels 1..r. The combined book then has
// zero contraction with every signature on those levels.
PortfolioSpec build_hedge(const PortfolioSpec& portfolio, int level);

PortfolioSpec combine(const PortfolioSpec& a, const PortfolioSpec& b);

enum class PLAZone { green, amber, red };

const char* to_string(PLAZone zone);

struct PLAThresholds {
  double spearman_green = 0.80;
  double spearman_amber = 0.70;
  double ks_green = 0.09;
  double ks_amber = 0.12;
};

struct PLAReport {
  double spearman = 0.0;
  double ks_stat = 0.0;
  std::vector<double> unexplained;  // HPL - RTPL per step
  PLAZone zone = PLAZone::red;
  bool degenerate = false;          // constant series, Spearman undefined
};

// RTPL_t = <w, Phi_{t+1} - Phi_t>; HPL defaults to the same contraction (a
// signature-linear book) unless a realised series is supplied. Spearman uses
// average ranks for ties; KS is the two-sample statistic.
PLAReport pla_test(const PortfolioSpec& portfolio,
                   const std::vector<TruncatedTensor>& phi_series,
                   const std::optional<std::vector<double>>& realised_hpl = std::nullopt,
                   const PLAThresholds& thresholds = {});

struct CapitalReport {
  TruncatedTensor weighted_sensitivities;  // elementwise risk weight x delta, levels 1..N
  double charge = 0.0;                     // l2 norm of the weighted sensitivities
  double rrao_residual = 0.0;

  explicit CapitalReport(const AlgebraShape& shape) : weighted_sensitivities(shape) {}
};

// Weighted-sensitivity charge over levels 1..N (the scalar coordinate is
// cash and carries no risk weight). rrao_residual is the fit residual at
// depth r when a payoff fit is supplied, else the norm of weight mass above
// level r.
CapitalReport capital_charge(const PortfolioSpec& portfolio, const TruncatedTensor& risk_weights,
                             const std::optional<PayoffFit>& fit, int level);

}  // namespace sigrisk
