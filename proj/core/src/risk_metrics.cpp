#include "sigrisk/risk_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sigrisk {

double loss(const PortfolioSpec& portfolio, const TruncatedTensor& sig) {
  return portfolio.initial_value - inner_product(portfolio.weights, sig);
}

double loss(const PortfolioSpec& portfolio, const GroupElement& sig) {
  return loss(portfolio, sig.tensor());
}

TailResult tail_analysis(const PortfolioSpec& portfolio, const SignatureEnsemble& ens,
                         double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("tail_analysis: alpha must lie in (0, 1)");
  if (ens.members.empty()) throw std::invalid_argument("tail_analysis: empty ensemble");
  if (portfolio.weights.shape() != ens.shape)
    throw shape_mismatch_error("tail_analysis: portfolio weights and ensemble shapes differ");

  const std::size_t n = ens.members.size();
  std::vector<double> losses(n);
  for (std::size_t i = 0; i < n; ++i) losses[i] = loss(portfolio, ens.members[i]);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Stable sort on strictly-greater leaves ties in ascending-index order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return losses[a] > losses[b]; });

  const double raw_count = std::floor(static_cast<double>(n) * (1.0 - alpha));
  const std::size_t tail_count = std::max<std::size_t>(1, static_cast<std::size_t>(raw_count));

  TailResult result(ens.shape);
  result.alpha = alpha;
  result.tail_count = tail_count;
  result.tail_indices.assign(order.begin(), order.begin() + tail_count);
  result.s_var = losses[result.tail_indices.back()];

  double direct_sum = 0.0;
  for (std::size_t idx : result.tail_indices) {
    direct_sum += losses[idx];
    result.tail_signature += ens.members[idx].tensor();
  }
  result.tail_signature *= 1.0 / static_cast<double>(tail_count);
  const double direct = direct_sum / static_cast<double>(tail_count);
  const double decomposed = loss(portfolio, result.tail_signature);
  const double scale = std::max({1.0, std::abs(direct), std::abs(decomposed)});
  if (std::abs(direct - decomposed) > 1e-9 * scale)
    throw std::runtime_error(
        "tail_analysis: direct tail mean and weight/tail-signature decomposition disagree "
        "(direct=" + std::to_string(direct) + ", decomposed=" + std::to_string(decomposed) + ")");
  result.s_es = direct;

  const Level2Split split = sym_anti_level2(result.tail_signature);
  const double anti_sq = split.anti.frobenius_sq();
  const double total_sq = anti_sq + split.sym.frobenius_sq();
  result.tail_levy_share = total_sq > 0.0 ? anti_sq / total_sq : 0.0;
  return result;
}

double levy_gap_indicator(const TruncatedTensor& t, bool time_channel) {
  const AlgebraShape& shape = t.shape();
  if (shape.depth() < 2)
    throw std::invalid_argument("levy_gap_indicator: depth must be at least 2");
  const int first = time_channel ? 1 : 0;
  const int d = shape.dim();
  auto l2 = t.level(2);
  double anti_sq = 0.0;
  double sym_sq = 0.0;
  for (int i = first; i < d; ++i) {
    for (int j = first; j < d; ++j) {
      const double mij = l2[static_cast<std::size_t>(i) * d + j];
      const double mji = l2[static_cast<std::size_t>(j) * d + i];
      const double sym = 0.5 * (mij + mji);
      const double anti = 0.5 * (mij - mji);
      sym_sq += sym * sym;
      anti_sq += anti * anti;
    }
  }
  return anti_sq - sym_sq;
}

namespace {

std::vector<double> member_minima(const PortfolioSpec& portfolio, const SignatureEnsemble& ens) {
  if (!ens.has_flows())
    throw std::invalid_argument("pathwise evaluation requires an ensemble with flows");
  if (portfolio.weights.shape() != ens.shape)
    throw shape_mismatch_error("pathwise evaluation: weight and ensemble shapes differ");
  std::vector<double> minima(ens.flows.size());
  for (std::size_t i = 0; i < ens.flows.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& flow : ens.flows[i])
      lo = std::min(lo, inner_product(portfolio.weights, flow.tensor()));
    minima[i] = lo;
  }
  return minima;
}

}  // namespace

TEPResult tep(const PortfolioSpec& portfolio, const SignatureEnsemble& ens) {
  if (!ens.has_flows()) throw std::invalid_argument("tep: ensemble carries no flows");
  if (portfolio.weights.shape() != ens.shape)
    throw shape_mismatch_error("tep: portfolio weights and ensemble shapes differ");
  TEPResult result;
  result.grid = ens.flow_grid;
  result.values.resize(result.grid.size());
  for (std::size_t g = 0; g < result.grid.size(); ++g)
    result.values[g] = inner_product(portfolio.weights, mean_flow(ens, g));
  result.min_value = *std::min_element(result.values.begin(), result.values.end());
  result.solvency_prob = 1.0;
  return result;
}

TEPResult tep(const PortfolioSpec& portfolio, const SignatureEnsemble& ens, double threshold) {
  TEPResult result = tep(portfolio, ens);
  const auto minima = member_minima(portfolio, ens);
  std::size_t solvent = 0;
  for (double m : minima)
    if (m >= threshold) ++solvent;
  result.solvency_prob = static_cast<double>(solvent) / static_cast<double>(minima.size());
  return result;
}

SolvencyResult pathwise_solvency(const PortfolioSpec& portfolio, const SignatureEnsemble& ens,
                                 double threshold, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("pathwise_solvency: epsilon must lie in (0, 1)");
  const auto minima = member_minima(portfolio, ens);
  std::size_t solvent = 0;
  for (double m : minima)
    if (m >= threshold) ++solvent;
  SolvencyResult result;
  result.prob = static_cast<double>(solvent) / static_cast<double>(minima.size());
  result.pass = result.prob >= 1.0 - epsilon;
  return result;
}

}  // namespace sigrisk
