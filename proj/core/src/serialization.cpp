#include "sigrisk/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigrisk::io {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

std::pair<std::size_t, std::size_t> line_col_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void require_finite(const TruncatedTensor& t, const std::string& origin) {
  if (!t.all_finite()) fail(origin, "tensor contains non-finite coordinates");
}

double number_at(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key) || !j[key].is_number()) fail(origin, std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(origin, "parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json tensor_to_json(const TruncatedTensor& t) {
  require_finite(t, "tensor_to_json");
  json levels = json::array();
  for (int k = 0; k <= t.shape().depth(); ++k) {
    json level = json::array();
    for (double v : t.level(k)) level.push_back(v);
    levels.push_back(std::move(level));
  }
  return json{{"dim", t.shape().dim()}, {"depth", t.shape().depth()}, {"levels", levels}};
}

TruncatedTensor tensor_from_json(const json& j) {
  const std::string origin = "tensor_from_json";
  if (!j.is_object()) fail(origin, "expected an object");
  if (!j.contains("dim") || !j.contains("depth") || !j.contains("levels"))
    fail(origin, "needs 'dim', 'depth' and 'levels'");
  const AlgebraShape shape(j["dim"].get<int>(), j["depth"].get<int>());
  const json& levels = j["levels"];
  if (!levels.is_array() || static_cast<int>(levels.size()) != shape.depth() + 1)
    fail(origin, "'levels' must hold depth+1 arrays");
  TruncatedTensor t(shape);
  for (int k = 0; k <= shape.depth(); ++k) {
    const json& level = levels[static_cast<std::size_t>(k)];
    if (!level.is_array() || level.size() != shape.level_size(k))
      fail(origin, "level " + std::to_string(k) + " must hold " +
                       std::to_string(shape.level_size(k)) + " numbers");
    auto dst = t.level(k);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (!level[i].is_number()) fail(origin, "level " + std::to_string(k) + " entry is not a number");
      dst[i] = level[i].get<double>();
    }
  }
  require_finite(t, origin);
  return t;
}

GroupElement group_from_json(const json& j) {
  TruncatedTensor t = tensor_from_json(j);
  if (t.scalar() != 1.0)
    throw std::runtime_error("group_from_json: scalar level must equal 1 exactly");
  return GroupElement(std::move(t));
}

json portfolio_to_json(const PortfolioSpec& p) {
  return json{{"label", p.label},
              {"initial_value", p.initial_value},
              {"weights", tensor_to_json(p.weights)}};
}

PortfolioSpec portfolio_from_json(const json& j) {
  const std::string origin = "portfolio_from_json";
  if (!j.is_object() || !j.contains("weights")) fail(origin, "needs 'weights'");
  TruncatedTensor w = tensor_from_json(j["weights"]);
  const double v0 = j.value("initial_value", 0.0);
  if (!std::isfinite(v0)) fail(origin, "initial_value must be finite");
  return PortfolioSpec(std::move(w), v0, j.value("label", std::string{}));
}

json model_spec_to_json(const ModelSpec& m) {
  json corr = json::array();
  for (int i = 0; i < m.n_assets; ++i) {
    json row = json::array();
    for (int c = 0; c < m.n_assets; ++c)
      row.push_back(m.correlation[static_cast<std::size_t>(i) * m.n_assets + c]);
    corr.push_back(std::move(row));
  }
  return json{{"n_assets", m.n_assets},
              {"drift", m.drift},
              {"vol", m.vol},
              {"correlation", corr},
              {"jump_intensity", m.jump_intensity},
              {"jump_mean", m.jump_mean},
              {"jump_std", m.jump_std},
              {"horizon", m.horizon},
              {"steps", m.steps},
              {"initial", m.initial}};
}

ModelSpec model_spec_from_json(const json& j) {
  const std::string origin = "model_spec_from_json";
  if (!j.is_object()) fail(origin, "expected an object");
  ModelSpec m;
  if (!j.contains("n_assets")) fail(origin, "missing 'n_assets'");
  m.n_assets = j["n_assets"].get<int>();
  auto vec = [&](const char* key) -> std::vector<double> {
    if (!j.contains(key) || !j[key].is_array())
      fail(origin, std::string("missing array '") + key + "'");
    return j[key].get<std::vector<double>>();
  };
  m.drift = vec("drift");
  m.vol = vec("vol");
  m.initial = vec("initial");
  if (!j.contains("correlation") || !j["correlation"].is_array())
    fail(origin, "missing array 'correlation'");
  m.correlation.clear();
  for (const auto& row : j["correlation"]) {
    if (!row.is_array()) fail(origin, "'correlation' must be an array of rows");
    for (const auto& v : row) m.correlation.push_back(v.get<double>());
  }
  m.jump_intensity = j.value("jump_intensity", 0.0);
  m.jump_mean = j.value("jump_mean", 0.0);
  m.jump_std = j.value("jump_std", 0.0);
  m.horizon = number_at(j, "horizon", origin);
  if (!j.contains("steps")) fail(origin, "missing 'steps'");
  m.steps = j["steps"].get<int>();
  m.validate();
  return m;
}

namespace {

json levels_only(const TruncatedTensor& t) {
  json levels = json::array();
  for (int k = 0; k <= t.shape().depth(); ++k) {
    json level = json::array();
    for (double v : t.level(k)) level.push_back(v);
    levels.push_back(std::move(level));
  }
  return levels;
}

TruncatedTensor tensor_from_levels(const json& levels, const AlgebraShape& shape,
                                   const std::string& origin) {
  if (!levels.is_array() || static_cast<int>(levels.size()) != shape.depth() + 1)
    fail(origin, "member must hold depth+1 level arrays");
  TruncatedTensor t(shape);
  for (int k = 0; k <= shape.depth(); ++k) {
    const json& level = levels[static_cast<std::size_t>(k)];
    if (!level.is_array() || level.size() != shape.level_size(k))
      fail(origin, "member level " + std::to_string(k) + " has wrong length");
    auto dst = t.level(k);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = level[i].get<double>();
  }
  require_finite(t, origin);
  return t;
}

}  // namespace

json ensemble_to_json(const SignatureEnsemble& e) {
  json members = json::array();
  for (const auto& m : e.members) members.push_back(levels_only(m.tensor()));
  json out{{"dim", e.shape.dim()},
           {"depth", e.shape.depth()},
           {"seed", e.seed},
           {"members", std::move(members)}};
  if (e.has_flows()) {
    out["flow_grid"] = e.flow_grid;
    json flows = json::array();
    for (const auto& member_flows : e.flows) {
      json per_member = json::array();
      for (const auto& f : member_flows) per_member.push_back(levels_only(f.tensor()));
      flows.push_back(std::move(per_member));
    }
    out["flows"] = std::move(flows);
  }
  return out;
}

SignatureEnsemble ensemble_from_json(const json& j) {
  const std::string origin = "ensemble_from_json";
  if (!j.is_object() || !j.contains("dim") || !j.contains("depth") || !j.contains("members"))
    fail(origin, "needs 'dim', 'depth' and 'members'");
  const AlgebraShape shape(j["dim"].get<int>(), j["depth"].get<int>());
  SignatureEnsemble ens{shape, {}, {}, {}, j.value("seed", std::uint64_t{0})};
  for (const auto& m : j["members"]) {
    TruncatedTensor t = tensor_from_levels(m, shape, origin);
    if (t.scalar() != 1.0) fail(origin, "ensemble member is not group-like");
    ens.members.emplace_back(GroupElement(std::move(t)));
  }
  if (ens.members.empty()) fail(origin, "'members' must be nonempty");
  if (j.contains("flow_grid")) {
    ens.flow_grid = j["flow_grid"].get<std::vector<double>>();
    if (!j.contains("flows") || j["flows"].size() != ens.members.size())
      fail(origin, "'flows' must hold one entry per member");
    for (const auto& per_member : j["flows"]) {
      std::vector<GroupElement> flows;
      if (per_member.size() != ens.flow_grid.size())
        fail(origin, "flow entry length must match 'flow_grid'");
      for (const auto& f : per_member) {
        TruncatedTensor t = tensor_from_levels(f, shape, origin);
        if (t.scalar() != 1.0) fail(origin, "flow tensor is not group-like");
        flows.emplace_back(GroupElement(std::move(t)));
      }
      ens.flows.push_back(std::move(flows));
    }
  }
  return ens;
}

json tail_result_to_json(const TailResult& r) {
  return json{{"alpha", r.alpha},
              {"tail_count", r.tail_count},
              {"s_var", r.s_var},
              {"s_es", r.s_es},
              {"tail_levy_share", r.tail_levy_share},
              {"tail_indices", r.tail_indices},
              {"tail_signature", tensor_to_json(r.tail_signature)}};
}

json tep_result_to_json(const TEPResult& r) {
  return json{{"grid", r.grid},
              {"values", r.values},
              {"min_value", r.min_value},
              {"solvency_prob", r.solvency_prob}};
}

json pla_report_to_json(const PLAReport& r) {
  return json{{"spearman", r.spearman},
              {"ks_stat", r.ks_stat},
              {"zone", to_string(r.zone)},
              {"degenerate", r.degenerate},
              {"unexplained", r.unexplained}};
}

json capital_report_to_json(const CapitalReport& r) {
  return json{{"charge", r.charge},
              {"rrao_residual", r.rrao_residual},
              {"weighted_sensitivities", tensor_to_json(r.weighted_sensitivities)}};
}

json payoff_fit_to_json(const PayoffFit& f) {
  return json{{"depth_used", f.depth_used},
              {"in_sample_rmse", f.in_sample_rmse},
              {"ridge_engaged", f.ridge_engaged},
              {"residual_by_depth", f.residual_by_depth},
              {"weights", tensor_to_json(f.weights)}};
}

PayoffFit payoff_fit_from_json(const json& j) {
  const std::string origin = "payoff_fit_from_json";
  if (!j.is_object() || !j.contains("weights")) fail(origin, "needs 'weights'");
  TruncatedTensor w = tensor_from_json(j["weights"]);
  PayoffFit fit(w.shape());
  fit.weights = std::move(w);
  fit.depth_used = j.value("depth_used", 0);
  fit.in_sample_rmse = j.value("in_sample_rmse", 0.0);
  fit.ridge_engaged = j.value("ridge_engaged", false);
  if (j.contains("residual_by_depth"))
    fit.residual_by_depth = j["residual_by_depth"].get<std::vector<double>>();
  return fit;
}

json scenario_to_json(const StressScenario& s) {
  return json{{"name", s.name},
              {"kind", to_string(s.kind)},
              {"params", s.params},
              {"generator_norm", s.generator_norm},
              {"operator", tensor_to_json(s.perturbation.op.tensor())}};
}

StressScenario scenario_from_json(const json& j, const AlgebraShape& shape,
                                  const std::optional<TruncatedTensor>& base_phi,
                                  std::span<const double> level_weights) {
  const std::string origin = "scenario_from_json";
  if (!j.is_object() || !j.contains("kind")) fail(origin, "needs 'kind'");
  const StressKind kind = stress_kind_from_string(j["kind"].get<std::string>());
  const std::string name = j.value("name", std::string(to_string(kind)));
  const json params = j.value("params", json::object());

  if (j.contains("operator")) {
    TruncatedTensor op = tensor_from_json(j["operator"]);
    if (op.shape() != shape) fail(origin, "operator shape does not match the engine shape");
    if (op.scalar() != 1.0) fail(origin, "operator is not group-like");
    StressScenario s(name, BridgeOperator(GroupElement(std::move(op)), name), kind);
    // The stored norm, if any, is ignored: the invariant is recomputed here.
    if (!level_weights.empty())
      s.generator_norm = weighted_norm(tensor_log(s.perturbation.op), level_weights);
    s.params = params;
    return s;
  }
  switch (kind) {
    case StressKind::antisymmetric_shock: {
      const int i = params.value("i", -1);
      const int jdx = params.value("j", -1);
      const double a = params.value("magnitude", 0.0);
      StressScenario s = make_antisymmetric_shock(shape, i, jdx, a, level_weights);
      s.name = name;
      return s;
    }
    case StressKind::correlation_break: {
      if (!base_phi)
        fail(origin, "correlation_break without an operator needs a base expected signature");
      const int i = params.value("i", -1);
      const int jdx = params.value("j", -1);
      StressScenario s = make_correlation_break(shape, i, jdx, *base_phi, level_weights);
      s.name = name;
      return s;
    }
    case StressKind::custom:
      fail(origin, "custom scenarios must carry an 'operator' tensor");
  }
  fail(origin, "unreachable scenario kind");
}

json monitor_event_to_json(const MonitorEvent& e) {
  return json{{"time", e.time},
              {"divergence", e.divergence},
              {"td_error", e.td_error},
              {"levy_gap", e.levy_gap},
              {"breach", to_string(e.breach)}};
}

}  // namespace sigrisk::io
