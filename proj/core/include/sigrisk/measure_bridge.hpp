#pragma once

// Measure-bridge operator algebra and geometrical stress scenarios: the
// bridge maps the physical expected signature to the risk-neutral one by
// right tensor multiplication, and stress is a further group-valued
// perturbation composed onto it. Flash crashes are anti-symmetric level-2
// shocks, correlation breaks zero an off-diagonal symmetric coordinate, and
// the resilience threshold gates on the norm of the perturbation generator.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk {

struct BridgeOperator {
  GroupElement op;
  std::string label;

  BridgeOperator(GroupElement g, std::string name = {})
      : op(std::move(g)), label(std::move(name)) {}
};

enum class StressKind { antisymmetric_shock, correlation_break, custom };

const char* to_string(StressKind kind);
StressKind stress_kind_from_string(const std::string& s);

struct StressScenario {
  std::string name;
  BridgeOperator perturbation;
  double generator_norm = 0.0;  // ||log perturbation|| under the configured weighted norm
  StressKind kind = StressKind::custom;
  nlohmann::json params;        // provenance metadata carried by scenario files

  StressScenario(std::string scenario_name, BridgeOperator delta, StressKind k);
};

// Phi^Q = Phi^P (x) Lambda.
TruncatedTensor apply_bridge(const TruncatedTensor& phi_p, const BridgeOperator& bridge);
GroupElement apply_bridge(const GroupElement& phi_p, const BridgeOperator& bridge);

// Lambda* = Lambda (x) DeltaLambda; base first, perturbation second.
BridgeOperator compose_stress(const BridgeOperator& base, const BridgeOperator& delta);

// exp(a (e_ij - e_ji)) for asset channels i != j: level-1 empty, level-2
// symmetric part zero, level-2 anti part +-a. Channel 0 is the time channel
// and cannot be shocked.
StressScenario make_antisymmetric_shock(const AlgebraShape& shape, int i, int j,
                                        double magnitude,
                                        std::span<const double> level_weights = {});

// Multiplicative perturbation exp(-s (e_ij + e_ji)) with s the (i,j)
// symmetric level-2 coordinate of base_phi, so the stressed tensor has that
// coordinate exactly zeroed while staying in the group orbit.
StressScenario make_correlation_break(const AlgebraShape& shape, int i, int j,
                                      const TruncatedTensor& base_phi,
                                      std::span<const double> level_weights = {});

struct ResilienceResult {
  bool resilient = false;
  double generator_norm = 0.0;
};

// Go/no-go threshold on the perturbation generator: resilient iff
// ||log DeltaLambda|| <= rho.
ResilienceResult resilience_check(const StressScenario& scenario, double rho);

}  // namespace sigrisk
