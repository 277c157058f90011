#pragma once

// Streaming geometric-trace monitor. Each tick is lifted to its one-step
// signature, compared against the model's prior one-step expectation, and
// the resulting terminal-view jump is scored as the geometric divergence
// and the sensitivity-weighted TD-error.
//
// Anchoring: all terminal views are expressed at the current grounding
// point. The prior terminal view is the expected step composed with the
// expected remaining signature; the posterior replaces the expected step
// by the realised one and parallel-transports by the inverse of the prior
// step. When the realised increment matches the prior expectation the two
// views coincide and the divergence is exactly zero.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sigrisk/path_signature.hpp"
#include "sigrisk/risk_metrics.hpp"
#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

// Norm of the gap between the re-anchored terminal projection and the
// parallel-transported prior: || phi_T_t - inverse(step_prior) (x) phi_T_prior ||.
double geometric_divergence(const TruncatedTensor& phi_T_t, const GroupElement& phi_step_prior,
                            const TruncatedTensor& phi_T_prior,
                            std::span<const double> level_weights = {});

// reward + <w_G, gamma * phi_T_t - inverse(step_prior) (x) phi_T_prior>.
double realised_td_error(double reward, const PortfolioSpec& w_g, double gamma,
                         const TruncatedTensor& phi_T_t, const GroupElement& phi_step_prior,
                         const TruncatedTensor& phi_T_prior);

enum class BreachKind { none, divergence, td_error, both };

const char* to_string(BreachKind kind);

struct MonitorEvent {
  double time = 0.0;
  double divergence = 0.0;
  double td_error = 0.0;
  BreachKind breach = BreachKind::none;
  double levy_gap = 0.0;  // of the running signature's level 2, asset block
};

struct MonitorThresholds {
  double divergence = 0.0;
  double td_error = 0.0;
};

// Model side of the monitor: for a tick at `time`, the expected one-step
// signature of the increment ending there and the expected remaining
// signature over [time, T].
struct ExpectedFlow {
  GroupElement step;
  TruncatedTensor remaining;
};
using ExpectedFlowFn = std::function<ExpectedFlow(double time)>;

enum class RewardMode { zero, step_pnl };

class MonitorState {
 public:
  MonitorState(RunningSignature running, PortfolioSpec sensitivity, double gamma,
               MonitorThresholds thresholds, RewardMode reward_mode = RewardMode::zero,
               std::vector<double> level_weights = {});

  // Consume one tick. Out-of-order ticks are rejected: no state change, no
  // event, nullopt returned. Accepted ticks update the running signature,
  // re-anchor the terminal view through the flow model and append the event.
  std::optional<MonitorEvent> process_tick(double time, std::span<const double> values,
                                           const ExpectedFlowFn& expected_flow);

  const RunningSignature& running() const { return running_; }
  const TruncatedTensor& prior_terminal() const { return prior_terminal_; }
  const TruncatedTensor& prior_step() const { return prior_step_; }
  double gamma() const { return gamma_; }
  const PortfolioSpec& sensitivity() const { return sensitivity_; }
  const MonitorThresholds& thresholds() const { return thresholds_; }
  const std::vector<MonitorEvent>& event_log() const { return event_log_; }
  std::uint64_t rejected_ticks() const { return rejected_; }

 private:
  RunningSignature running_;
  PortfolioSpec sensitivity_;  // w_G
  double gamma_;
  MonitorThresholds thresholds_;
  RewardMode reward_mode_;
  std::vector<double> level_weights_;
  TruncatedTensor prior_terminal_;  // expected step (x) expected remaining, last tick
  TruncatedTensor prior_step_;      // expected one-step signature, last tick
  std::vector<MonitorEvent> event_log_;
  std::uint64_t rejected_ = 0;
};

// True iff log(sig) and log(tail centroid) are within `radius` of each other
// on their level-2 blocks under the configured weighted norm: the running
// trace has entered the ball around the tail-set centroid.
bool breach_region_check(const GroupElement& sig, const TailResult& tail, double radius,
                         std::span<const double> level_weights = {});

// Expected-flow model derived from a signature ensemble with flows plus the
// generator's conditional mean increment per unit time. Steps are the exact
// exponential of the mean increment over the elapsed interval; remaining
// views are ensemble means of inverse(prefix) (x) terminal.
class EnsembleFlowModel {
 public:
  EnsembleFlowModel(const SignatureEnsemble& ens, std::vector<double> mean_rate_per_year);

  ExpectedFlow at(double prev_time, double time) const;

  // Binds the previous-tick time internally so the result satisfies the
  // ExpectedFlowFn interface of MonitorState.
  ExpectedFlowFn make_flow_fn(double start_time) const;

 private:
  AlgebraShape shape_;
  std::vector<double> grid_;
  std::vector<TruncatedTensor> remaining_;  // mean remaining signature per grid point
  std::vector<double> mean_rate_;           // per-year drift of (time, assets...) increments
};

}  // namespace sigrisk
