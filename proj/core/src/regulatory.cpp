#include "sigrisk/regulatory.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sigrisk {

namespace {

struct SolveResult {
  Eigen::VectorXd coeffs;
  bool ridge = false;
};

SolveResult solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs,
                                double ridge_lambda) {
  const Eigen::Index cols = design.cols();
  Eigen::MatrixXd gram = design.transpose() * design;
  Eigen::VectorXd moment = design.transpose() * rhs;
  SolveResult out;
  if (design.rows() >= cols) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    // Exactly collinear columns (a fixed time grid makes the time words
    // constant across samples) show up as vanishing pivots; route those to
    // the ridge instead of amplifying the null space.
    const auto& pivots = ldlt.vectorD();
    const double max_pivot = pivots.cwiseAbs().maxCoeff();
    const double min_pivot = pivots.cwiseAbs().minCoeff();
    if (ldlt.info() == Eigen::Success && max_pivot > 0.0 && min_pivot > 1e-10 * max_pivot) {
      out.coeffs = ldlt.solve(moment);
      if (out.coeffs.allFinite()) return out;
    }
  }
  const double scale = gram.trace() / static_cast<double>(cols);
  gram.diagonal().array() += ridge_lambda * (scale > 0.0 ? scale : 1.0);
  out.coeffs = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(moment);
  out.ridge = true;
  if (!out.coeffs.allFinite())
    throw std::runtime_error("fit_payoff_weights: degenerate design matrix");
  return out;
}

}  // namespace

PayoffFit fit_payoff_weights(const std::vector<double>& payoffs,
                             const std::vector<GroupElement>& sigs, int depth,
                             double ridge_lambda) {
  if (sigs.empty()) throw std::invalid_argument("fit_payoff_weights: empty sample");
  if (payoffs.size() != sigs.size())
    throw std::invalid_argument("fit_payoff_weights: payoff/signature count mismatch");
  const AlgebraShape& shape = sigs.front().shape();
  if (depth < 1 || depth > shape.depth())
    throw std::invalid_argument("fit_payoff_weights: depth out of range");

  const Eigen::Index n = static_cast<Eigen::Index>(sigs.size());
  const Eigen::Index full_cols = static_cast<Eigen::Index>(shape.level_offset(depth + 1));
  Eigen::MatrixXd design(n, full_cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto flat = sigs[static_cast<std::size_t>(i)].tensor().flat();
    for (Eigen::Index c = 0; c < full_cols; ++c) design(i, c) = flat[static_cast<std::size_t>(c)];
  }
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = payoffs[static_cast<std::size_t>(i)];

  PayoffFit fit(shape);
  fit.depth_used = depth;
  fit.residual_by_depth.reserve(static_cast<std::size_t>(depth));
  Eigen::VectorXd final_coeffs;
  for (int r = 1; r <= depth; ++r) {
    const Eigen::Index cols = static_cast<Eigen::Index>(shape.level_offset(r + 1));
    const auto sub = design.leftCols(cols);
    SolveResult solved = solve_least_squares(sub, rhs, ridge_lambda);
    const double rmse = std::sqrt((sub * solved.coeffs - rhs).squaredNorm() /
                                  static_cast<double>(n));
    fit.residual_by_depth.push_back(rmse);
    if (r == depth) {
      final_coeffs = std::move(solved.coeffs);
      fit.ridge_engaged = solved.ridge;
      fit.in_sample_rmse = rmse;
    }
  }
  auto flat = fit.weights.flat();
  for (Eigen::Index c = 0; c < final_coeffs.size(); ++c)
    flat[static_cast<std::size_t>(c)] = final_coeffs(c);
  return fit;
}

TruncatedTensor geometric_delta(const PortfolioSpec& portfolio) { return portfolio.weights; }

PortfolioSpec build_hedge(const PortfolioSpec& portfolio, int level) {
  const AlgebraShape& shape = portfolio.weights.shape();
  if (level < 0 || level > shape.depth())
    throw std::invalid_argument("build_hedge: level out of range");
  TruncatedTensor hedge(shape);
  for (int k = 1; k <= level; ++k) {
    auto src = portfolio.weights.level(k);
    auto dst = hedge.level(k);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = -src[i];
  }
  return PortfolioSpec(std::move(hedge), 0.0, portfolio.label + "_hedge");
}

PortfolioSpec combine(const PortfolioSpec& a, const PortfolioSpec& b) {
  TruncatedTensor w = a.weights;
  w += b.weights;
  return PortfolioSpec(std::move(w), a.initial_value + b.initial_value,
                       a.label + "+" + b.label);
}

const char* to_string(PLAZone zone) {
  switch (zone) {
    case PLAZone::green: return "green";
    case PLAZone::amber: return "amber";
    case PLAZone::red: return "red";
  }
  return "red";
}

namespace {

bool is_constant(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return a != b; }) ==
         v.end();
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman_avg_ranks(const std::vector<double>& a, const std::vector<double>& b) {
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  if (ra == rb) return 1.0;  // identical rankings correlate perfectly by definition
  return pearson(ra, rb);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace

PLAReport pla_test(const PortfolioSpec& portfolio,
                   const std::vector<TruncatedTensor>& phi_series,
                   const std::optional<std::vector<double>>& realised_hpl,
                   const PLAThresholds& thresholds) {
  if (phi_series.size() < 2)
    throw std::invalid_argument("pla_test: series must have at least 2 points");
  const std::size_t steps = phi_series.size() - 1;
  std::vector<double> rtpl(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    TruncatedTensor diff = phi_series[t + 1];
    diff -= phi_series[t];
    rtpl[t] = inner_product(portfolio.weights, diff);
  }
  std::vector<double> hpl = realised_hpl ? *realised_hpl : rtpl;
  if (hpl.size() != steps)
    throw std::invalid_argument("pla_test: realised HPL length must match series steps");

  PLAReport report;
  report.unexplained.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) report.unexplained[t] = hpl[t] - rtpl[t];

  if (is_constant(rtpl) || is_constant(hpl)) {
    report.degenerate = true;
    report.spearman = 0.0;
    report.ks_stat = ks_two_sample(hpl, rtpl);
    report.zone = PLAZone::red;
    return report;
  }
  report.spearman = spearman_avg_ranks(hpl, rtpl);
  report.ks_stat = ks_two_sample(hpl, rtpl);
  if (report.spearman >= thresholds.spearman_green && report.ks_stat <= thresholds.ks_green)
    report.zone = PLAZone::green;
  else if (report.spearman >= thresholds.spearman_amber && report.ks_stat <= thresholds.ks_amber)
    report.zone = PLAZone::amber;
  else
    report.zone = PLAZone::red;
  return report;
}

CapitalReport capital_charge(const PortfolioSpec& portfolio, const TruncatedTensor& risk_weights,
                             const std::optional<PayoffFit>& fit, int level) {
  const AlgebraShape& shape = portfolio.weights.shape();
  if (risk_weights.shape() != shape)
    throw shape_mismatch_error("capital_charge: risk weight shape differs");
  if (level < 0 || level > shape.depth())
    throw std::invalid_argument("capital_charge: level out of range");
  for (double w : risk_weights.flat())
    if (w < 0.0) throw std::invalid_argument("capital_charge: risk weights must be nonnegative");

  const TruncatedTensor delta = geometric_delta(portfolio);
  CapitalReport report(shape);
  double charge_sq = 0.0;
  for (int k = 1; k <= shape.depth(); ++k) {
    auto dk = delta.level(k);
    auto rk = risk_weights.level(k);
    auto ok = report.weighted_sensitivities.level(k);
    for (std::size_t i = 0; i < dk.size(); ++i) {
      ok[i] = rk[i] * dk[i];
      charge_sq += ok[i] * ok[i];
    }
  }
  report.charge = std::sqrt(charge_sq);

  if (fit) {
    if (level >= 1 && level <= fit->depth_used)
      report.rrao_residual = fit->residual_by_depth[static_cast<std::size_t>(level) - 1];
    else
      report.rrao_residual = fit->in_sample_rmse;
  } else {
    double mass = 0.0;
    for (int k = level + 1; k <= shape.depth(); ++k)
      for (double v : portfolio.weights.level(k)) mass += v * v;
    report.rrao_residual = std::sqrt(mass);
  }
  return report;
}

}  // namespace sigrisk
