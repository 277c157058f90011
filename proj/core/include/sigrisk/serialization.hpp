#pragma once

// JSON wire formats for every artifact the engine reads or writes. Doubles
// are emitted in the JSON library's shortest round-trip decimal form
// (Grisu2) and parsed with strtod, so finite values survive a round trip
// bit for bit; non-finite values are rejected on both sides.

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "sigrisk/market_models.hpp"
#include "sigrisk/measure_bridge.hpp"
#include "sigrisk/monitoring.hpp"
#include "sigrisk/path_signature.hpp"
#include "sigrisk/regulatory.hpp"
#include "sigrisk/risk_metrics.hpp"
#include "sigrisk/tensor_algebra.hpp"

namespace sigrisk::io {

using nlohmann::json;

// Parse a JSON document, mapping parse failures to line/column-precise
// messages that include the file name.
json parse_json_file(const std::filesystem::path& path);
json parse_json_text(const std::string& text, const std::string& origin);

void write_text_file(const std::filesystem::path& path, const std::string& text);

// {"dim": d, "depth": N, "levels": [[...], [...], ...]} with levels 0..N.
json tensor_to_json(const TruncatedTensor& t);
TruncatedTensor tensor_from_json(const json& j);
GroupElement group_from_json(const json& j);

json portfolio_to_json(const PortfolioSpec& p);
PortfolioSpec portfolio_from_json(const json& j);

json model_spec_to_json(const ModelSpec& m);
ModelSpec model_spec_from_json(const json& j);

json ensemble_to_json(const SignatureEnsemble& e);
SignatureEnsemble ensemble_from_json(const json& j);

json tail_result_to_json(const TailResult& r);
json tep_result_to_json(const TEPResult& r);
json pla_report_to_json(const PLAReport& r);
json capital_report_to_json(const CapitalReport& r);
json payoff_fit_to_json(const PayoffFit& f);
PayoffFit payoff_fit_from_json(const json& j);

// Scenario files: {"name", "kind", "params", "operator"?}. Constructed
// kinds (antisymmetric_shock, correlation_break) may omit the operator and
// carry construction params instead; correlation breaks then need the base
// expected signature at load time.
json scenario_to_json(const StressScenario& s);
StressScenario scenario_from_json(const json& j, const AlgebraShape& shape,
                                  const std::optional<TruncatedTensor>& base_phi = std::nullopt,
                                  std::span<const double> level_weights = {});

json monitor_event_to_json(const MonitorEvent& e);

}  // namespace sigrisk::io
