#include "sigrisk/monitoring.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace sigrisk {

double geometric_divergence(const TruncatedTensor& phi_T_t, const GroupElement& phi_step_prior,
                            const TruncatedTensor& phi_T_prior,
                            std::span<const double> level_weights) {
  if (phi_T_t.shape() != phi_T_prior.shape() || phi_T_t.shape() != phi_step_prior.shape())
    throw shape_mismatch_error("geometric_divergence: operand shapes differ");
  const GroupElement inv = group_inverse(phi_step_prior);
  TruncatedTensor transported = tensor_product(inv.tensor(), phi_T_prior);
  TruncatedTensor gap = phi_T_t;
  gap -= transported;
  return weighted_norm(gap, level_weights);
}

double realised_td_error(double reward, const PortfolioSpec& w_g, double gamma,
                         const TruncatedTensor& phi_T_t, const GroupElement& phi_step_prior,
                         const TruncatedTensor& phi_T_prior) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("realised_td_error: gamma must lie in (0, 1]");
  if (w_g.weights.shape() != phi_T_t.shape())
    throw shape_mismatch_error("realised_td_error: weight shape differs");
  const GroupElement inv = group_inverse(phi_step_prior);
  TruncatedTensor shifted = phi_T_t;
  shifted *= gamma;
  shifted -= tensor_product(inv.tensor(), phi_T_prior);
  return reward + inner_product(w_g.weights, shifted);
}

const char* to_string(BreachKind kind) {
  switch (kind) {
    case BreachKind::none: return "none";
    case BreachKind::divergence: return "divergence";
    case BreachKind::td_error: return "td_error";
    case BreachKind::both: return "both";
  }
  return "none";
}

MonitorState::MonitorState(RunningSignature running, PortfolioSpec sensitivity, double gamma,
                           MonitorThresholds thresholds, RewardMode reward_mode,
                           std::vector<double> level_weights)
    : running_(std::move(running)),
      sensitivity_(std::move(sensitivity)),
      gamma_(gamma),
      thresholds_(thresholds),
      reward_mode_(reward_mode),
      level_weights_(std::move(level_weights)),
      prior_terminal_(running_.shape()),
      prior_step_(running_.shape()) {
  if (!(gamma_ > 0.0 && gamma_ <= 1.0))
    throw std::invalid_argument("MonitorState: gamma must lie in (0, 1]");
  if (!(thresholds_.divergence > 0.0) || !(thresholds_.td_error > 0.0))
    throw std::invalid_argument("MonitorState: thresholds must be positive");
  if (sensitivity_.weights.shape() != running_.shape())
    throw shape_mismatch_error("MonitorState: sensitivity weights shape differs");
  prior_terminal_.set_scalar(1.0);
  prior_step_.set_scalar(1.0);
}

std::optional<MonitorEvent> MonitorState::process_tick(double time,
                                                       std::span<const double> values,
                                                       const ExpectedFlowFn& expected_flow) {
  if (!(time > running_.last_time())) {
    ++rejected_;
    return std::nullopt;
  }

  // Realised one-step signature, lifted from the increment.
  const AlgebraShape& shape = running_.shape();
  std::vector<double> inc(static_cast<std::size_t>(shape.dim()));
  inc[0] = time - running_.last_time();
  auto prev = running_.last_values();
  for (std::size_t a = 0; a < values.size(); ++a) inc[a + 1] = values[a] - prev[a];
  const GroupElement realised_step = segment_exp(shape, inc);

  const ExpectedFlow flow = expected_flow(time);
  if (flow.step.shape() != shape || flow.remaining.shape() != shape)
    throw shape_mismatch_error("process_tick: flow model shape differs");

  prior_step_ = flow.step.tensor();
  prior_terminal_ = tensor_product(flow.step.tensor(), flow.remaining);

  // Posterior terminal view at the new grounding point: replace the expected
  // step by the realised one, transported by the inverse of the prior step.
  const GroupElement inv_step = group_inverse(flow.step);
  TruncatedTensor surprise = tensor_product(inv_step.tensor(), realised_step.tensor());
  const TruncatedTensor phi_T_t = tensor_product(surprise, flow.remaining);

  const double divergence =
      geometric_divergence(phi_T_t, flow.step, prior_terminal_, level_weights_);
  double reward = 0.0;
  if (reward_mode_ == RewardMode::step_pnl) {
    TruncatedTensor step_move = realised_step.tensor();
    step_move.set_scalar(0.0);  // step signature minus identity
    reward = inner_product(sensitivity_.weights, step_move);
  }
  const double td =
      realised_td_error(reward, sensitivity_, gamma_, phi_T_t, flow.step, prior_terminal_);

  running_.push(time, values);

  MonitorEvent event;
  event.time = time;
  event.divergence = divergence;
  event.td_error = td;
  event.levy_gap = levy_gap_indicator(running_.sig().tensor());
  const bool div_breach = divergence > thresholds_.divergence;
  const bool td_breach = std::abs(td) > thresholds_.td_error;
  event.breach = div_breach ? (td_breach ? BreachKind::both : BreachKind::divergence)
                            : (td_breach ? BreachKind::td_error : BreachKind::none);
  event_log_.push_back(event);
  return event;
}

bool breach_region_check(const GroupElement& sig, const TailResult& tail, double radius,
                         std::span<const double> level_weights) {
  if (!(radius > 0.0)) throw std::invalid_argument("breach_region_check: radius must be > 0");
  if (sig.shape() != tail.tail_signature.shape())
    throw shape_mismatch_error("breach_region_check: shapes differ");
  const TruncatedTensor log_sig = tensor_log(sig);
  const TruncatedTensor log_tail = tensor_log(tail.tail_signature);
  auto a = log_sig.level(2);
  auto b = log_tail.level(2);
  double w2 = 1.0;
  if (!level_weights.empty()) {
    if (static_cast<int>(level_weights.size()) != sig.shape().depth() + 1)
      throw std::invalid_argument("breach_region_check: need one weight per level");
    w2 = level_weights[2];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return w2 * std::sqrt(acc) < radius;
}

EnsembleFlowModel::EnsembleFlowModel(const SignatureEnsemble& ens,
                                     std::vector<double> mean_rate_per_year)
    : shape_(ens.shape), grid_(ens.flow_grid), mean_rate_(std::move(mean_rate_per_year)) {
  if (!ens.has_flows())
    throw std::invalid_argument("EnsembleFlowModel: ensemble carries no flows");
  if (static_cast<int>(mean_rate_.size()) != shape_.dim() - 1)
    throw std::invalid_argument("EnsembleFlowModel: need one mean rate per asset");
  remaining_.reserve(grid_.size());
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    TruncatedTensor mean(shape_);
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
      const GroupElement inv = group_inverse(ens.flows[i][g]);
      mean += tensor_product(inv.tensor(), ens.members[i].tensor());
    }
    mean *= 1.0 / static_cast<double>(ens.members.size());
    remaining_.push_back(std::move(mean));
  }
}

ExpectedFlow EnsembleFlowModel::at(double prev_time, double time) const {
  if (!(time > prev_time))
    throw std::invalid_argument("EnsembleFlowModel: time must advance");
  const double dt = time - prev_time;
  std::vector<double> inc(static_cast<std::size_t>(shape_.dim()));
  inc[0] = dt;
  for (std::size_t a = 0; a + 1 < inc.size(); ++a) inc[a + 1] = mean_rate_[a] * dt;
  GroupElement step = segment_exp(shape_, inc);

  // Remaining view from the nearest grid point at or after `time`.
  auto it = std::lower_bound(grid_.begin(), grid_.end(), time - 1e-12);
  const std::size_t idx = std::min(static_cast<std::size_t>(it - grid_.begin()),
                                   grid_.empty() ? 0 : grid_.size() - 1);
  return ExpectedFlow{std::move(step), remaining_[idx]};
}

ExpectedFlowFn EnsembleFlowModel::make_flow_fn(double start_time) const {
  auto prev = std::make_shared<double>(start_time);
  return [this, prev](double time) {
    ExpectedFlow flow = at(*prev, time);
    *prev = time;
    return flow;
  };
}

}  // namespace sigrisk
