#include "sigrisk/measure_bridge.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sigrisk {

const char* to_string(StressKind kind) {
  switch (kind) {
    case StressKind::antisymmetric_shock: return "antisymmetric_shock";
    case StressKind::correlation_break: return "correlation_break";
    case StressKind::custom: return "custom";
  }
  return "custom";
}

StressKind stress_kind_from_string(const std::string& s) {
  if (s == "antisymmetric_shock") return StressKind::antisymmetric_shock;
  if (s == "correlation_break") return StressKind::correlation_break;
  if (s == "custom") return StressKind::custom;
  throw std::invalid_argument("unknown stress kind: " + s);
}

StressScenario::StressScenario(std::string scenario_name, BridgeOperator delta, StressKind k)
    : name(std::move(scenario_name)),
      perturbation(std::move(delta)),
      generator_norm(weighted_norm(tensor_log(perturbation.op))),
      kind(k),
      params(nlohmann::json::object()) {}

TruncatedTensor apply_bridge(const TruncatedTensor& phi_p, const BridgeOperator& bridge) {
  return tensor_product(phi_p, bridge.op.tensor());
}

GroupElement apply_bridge(const GroupElement& phi_p, const BridgeOperator& bridge) {
  return tensor_product(phi_p, bridge.op);
}

BridgeOperator compose_stress(const BridgeOperator& base, const BridgeOperator& delta) {
  return BridgeOperator(tensor_product(base.op, delta.op),
                        base.label.empty() ? delta.label : base.label + "*" + delta.label);
}

namespace {

void check_asset_pair(const AlgebraShape& shape, int i, int j) {
  if (shape.depth() < 2)
    throw std::invalid_argument("stress scenario: depth must be at least 2");
  if (i == j) throw std::invalid_argument("stress scenario: asset indices must differ");
  if (i <= 0 || j <= 0)
    throw std::invalid_argument("stress scenario: channel 0 is the time channel");
  if (i >= shape.dim() || j >= shape.dim())
    throw std::invalid_argument("stress scenario: asset index out of range");
}

TruncatedTensor level2_generator(const AlgebraShape& shape, int i, int j, double cij,
                                 double cji) {
  TruncatedTensor g(shape);
  g.set_coeff(MultiIndex{i, j}, cij);
  g.set_coeff(MultiIndex{j, i}, cji);
  return g;
}

}  // namespace

StressScenario make_antisymmetric_shock(const AlgebraShape& shape, int i, int j,
                                        double magnitude,
                                        std::span<const double> level_weights) {
  check_asset_pair(shape, i, j);
  const TruncatedTensor generator = level2_generator(shape, i, j, magnitude, -magnitude);
  StressScenario scenario("antisymmetric_shock", BridgeOperator(tensor_exp(generator)),
                          StressKind::antisymmetric_shock);
  if (!level_weights.empty())
    scenario.generator_norm = weighted_norm(tensor_log(scenario.perturbation.op), level_weights);
  scenario.params = {{"i", i}, {"j", j}, {"magnitude", magnitude}};
  return scenario;
}

StressScenario make_correlation_break(const AlgebraShape& shape, int i, int j,
                                      const TruncatedTensor& base_phi,
                                      std::span<const double> level_weights) {
  check_asset_pair(shape, i, j);
  if (base_phi.shape() != shape)
    throw shape_mismatch_error("make_correlation_break: base tensor shape differs");
  if (base_phi.scalar() != 1.0)
    throw std::invalid_argument("make_correlation_break: base tensor must be group-like");

  const Level2Split split = sym_anti_level2(base_phi);
  const double s = split.sym(i, j);
  const TruncatedTensor generator = level2_generator(shape, i, j, -s, -s);
  StressScenario scenario("correlation_break", BridgeOperator(tensor_exp(generator)),
                          StressKind::correlation_break);
  if (!level_weights.empty())
    scenario.generator_norm = weighted_norm(tensor_log(scenario.perturbation.op), level_weights);

  // The perturbation has no level-1 part, so the stressed level-2 is just
  // base + generator: the (i,j) symmetric coordinate lands on zero and the
  // anti coordinate is untouched. Both are reported for inspection.
  const TruncatedTensor stressed = apply_bridge(base_phi, scenario.perturbation);
  const Level2Split stressed_split = sym_anti_level2(stressed);
  scenario.params = {{"i", i},
                     {"j", j},
                     {"sym_removed", s},
                     {"stressed_sym_ij", stressed_split.sym(i, j)},
                     {"stressed_anti_ij", stressed_split.anti(i, j)}};
  return scenario;
}

ResilienceResult resilience_check(const StressScenario& scenario, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("resilience_check: rho must be > 0");
  ResilienceResult result;
  result.generator_norm = scenario.generator_norm;
  result.resilient = scenario.generator_norm <= rho;
  return result;
}

}  // namespace sigrisk
