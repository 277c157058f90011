// sigrisk: command-line front end for the geometric risk engine.
//
// Subcommands: sign, price, ses, tep, stress, monitor, pla, fit, capital.
// Structured artifacts are JSON, tick data is CSV, event streams are JSONL.
// Every command is deterministic given its inputs and --seed; reports land
// in --out (default stdout), diagnostics on stderr.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sigrisk/engine_config.hpp"
#include "sigrisk/market_models.hpp"
#include "sigrisk/measure_bridge.hpp"
#include "sigrisk/monitoring.hpp"
#include "sigrisk/path_signature.hpp"
#include "sigrisk/profiling.hpp"
#include "sigrisk/regulatory.hpp"
#include "sigrisk/risk_metrics.hpp"
#include "sigrisk/serialization.hpp"
#include "sigrisk/tensor_algebra.hpp"
#include "sigrisk/tick_io.hpp"

namespace fs = std::filesystem;
using sigrisk::io::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<int> dim;
  std::optional<int> depth;
  std::optional<std::uint64_t> seed;
  std::string out;

  sigrisk::EngineConfig resolve() const {
    sigrisk::EngineConfig cfg;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(sigrisk::EngineConfig::env_var_name())) path = env;
    }
    if (!path.empty()) cfg = sigrisk::EngineConfig::from_json_file(path);
    if (dim) cfg.dim = *dim;
    if (depth) cfg.depth = *depth;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

void emit_report(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  sigrisk::io::write_text_file(out_path, text);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

sigrisk::PortfolioSpec load_portfolio(const std::string& path) {
  return sigrisk::io::portfolio_from_json(sigrisk::io::parse_json_file(path));
}

sigrisk::ModelSpec load_model(const std::string& path) {
  return sigrisk::io::model_spec_from_json(sigrisk::io::parse_json_file(path));
}

std::vector<double> uniform_grid(double horizon, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int g = 1; g <= points; ++g)
    grid[static_cast<std::size_t>(g - 1)] = horizon * g / points;
  return grid;
}

std::vector<double> asset_mean_rates(const sigrisk::ModelSpec& model) {
  std::vector<double> rates(static_cast<std::size_t>(model.n_assets));
  for (int a = 0; a < model.n_assets; ++a)
    rates[static_cast<std::size_t>(a)] = model.drift[a] - 0.5 * model.vol[a] * model.vol[a] +
                                         model.jump_intensity * model.jump_mean;
  return rates;
}

json latency_to_json(const sigrisk::LatencyStats& s) {
  return json{{"p50_us", s.p50_us}, {"p90_us", s.p90_us}, {"p99_us", s.p99_us},
              {"max_us", s.max_us}, {"mean_us", s.mean_us}, {"count", s.count}};
}

// ---------------------------------------------------------------- sign ----

int cmd_sign(const GlobalOptions& global, const std::string& input,
             const std::string& time_format, const std::string& price_transform, bool profile,
             const std::string& portfolio_path, std::size_t profile_ticks) {
  sigrisk::EngineConfig cfg = global.resolve();
  sigrisk::io::TickFormat format = cfg.tick_format;
  if (!time_format.empty()) format.time = sigrisk::io::time_format_from_string(time_format);
  if (!price_transform.empty())
    format.transform = sigrisk::io::price_transform_from_string(price_transform);

  const sigrisk::io::TickCsv ticks = sigrisk::io::read_tick_csv(fs::path(input), format);
  const sigrisk::AlgebraShape shape(ticks.path.n_assets + 1, cfg.depth);
  if (global.dim && *global.dim != shape.dim())
    throw std::runtime_error("sign: --dim disagrees with the tick file's asset count");

  const sigrisk::GroupElement sig = sigrisk::compute_signature(ticks.path, shape);
  emit_report(global.out, dump_json(sigrisk::io::tensor_to_json(sig.tensor())));

  if (profile) {
    sigrisk::TruncatedTensor weights(shape);
    if (!portfolio_path.empty()) {
      weights = load_portfolio(portfolio_path).weights;
    } else {
      for (double& v : weights.level(1)) v = 1.0;
    }
    const sigrisk::LatencyStats stats =
        sigrisk::profile_update_valuation(shape, profile_ticks, weights, cfg.seed);
    std::cerr << "profile " << latency_to_json(stats).dump() << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- price ----

int cmd_price(const GlobalOptions& global, const std::string& portfolio_path,
              const std::string& phi_path) {
  const sigrisk::PortfolioSpec portfolio = load_portfolio(portfolio_path);
  const sigrisk::TruncatedTensor phi =
      sigrisk::io::tensor_from_json(sigrisk::io::parse_json_file(phi_path));
  const double value = sigrisk::inner_product(portfolio.weights, phi);
  const json report{{"label", portfolio.label},
                    {"value", value},
                    {"initial_value", portfolio.initial_value},
                    {"loss", portfolio.initial_value - value}};
  emit_report(global.out, dump_json(report));
  return 0;
}

// ----------------------------------------------------------------- ses ----

int cmd_ses(const GlobalOptions& global, const std::string& portfolio_path,
            const std::string& model_path, const std::string& ensemble_path, double alpha, int n,
            const std::string& loss_csv_path, const std::string& save_ensemble_path) {
  const sigrisk::EngineConfig cfg = global.resolve();
  const sigrisk::PortfolioSpec portfolio = load_portfolio(portfolio_path);

  const sigrisk::SignatureEnsemble ens = [&]() {
    if (!ensemble_path.empty())
      return sigrisk::io::ensemble_from_json(sigrisk::io::parse_json_file(ensemble_path));
    if (model_path.empty()) throw std::runtime_error("ses: need either --model or --ensemble");
    const sigrisk::ModelSpec model = load_model(model_path);
    const sigrisk::AlgebraShape shape(model.n_assets + 1, cfg.depth);
    const auto paths = sigrisk::generate_paths(model, n, cfg.seed);
    return sigrisk::build_ensemble(paths, shape, {}, cfg.seed);
  }();
  if (portfolio.weights.shape() != ens.shape)
    throw std::runtime_error("ses: portfolio and ensemble shapes differ");
  const sigrisk::TailResult tail = sigrisk::tail_analysis(portfolio, ens, alpha);
  emit_report(global.out, dump_json(sigrisk::io::tail_result_to_json(tail)));

  if (!loss_csv_path.empty()) {
    std::ostringstream csv;
    csv << "member,loss\n";
    for (std::size_t i = 0; i < ens.members.size(); ++i)
      csv << i << ',' << format_double(sigrisk::loss(portfolio, ens.members[i])) << '\n';
    sigrisk::io::write_text_file(loss_csv_path, csv.str());
  }
  if (!save_ensemble_path.empty())
    sigrisk::io::write_text_file(save_ensemble_path,
                                 dump_json(sigrisk::io::ensemble_to_json(ens)));
  return 0;
}

// ----------------------------------------------------------------- tep ----

int cmd_tep(const GlobalOptions& global, const std::string& portfolio_path,
            const std::string& model_path, int n, int grid_points,
            std::optional<double> threshold, double epsilon) {
  const sigrisk::EngineConfig cfg = global.resolve();
  const sigrisk::PortfolioSpec portfolio = load_portfolio(portfolio_path);
  const sigrisk::ModelSpec model = load_model(model_path);
  const sigrisk::AlgebraShape shape(model.n_assets + 1, cfg.depth);
  if (grid_points <= 0) grid_points = model.steps;

  const auto paths = sigrisk::generate_paths(model, n, cfg.seed);
  const sigrisk::SignatureEnsemble ens =
      sigrisk::build_ensemble(paths, shape, uniform_grid(model.horizon, grid_points), cfg.seed);

  json report;
  if (threshold) {
    const sigrisk::TEPResult tep_result = sigrisk::tep(portfolio, ens, *threshold);
    const sigrisk::SolvencyResult solvency =
        sigrisk::pathwise_solvency(portfolio, ens, *threshold, epsilon);
    report = sigrisk::io::tep_result_to_json(tep_result);
    report["threshold"] = *threshold;
    report["epsilon"] = epsilon;
    report["solvency_pass"] = solvency.pass;
  } else {
    report = sigrisk::io::tep_result_to_json(sigrisk::tep(portfolio, ens));
  }
  emit_report(global.out, dump_json(report));
  return 0;
}

// -------------------------------------------------------------- stress ----

int cmd_stress(const GlobalOptions& global, const std::string& portfolio_path,
               const std::string& scenario_path, const std::string& model_path,
               const std::string& phi_path, const std::string& bridge_path, double rho, int n) {
  const sigrisk::EngineConfig cfg = global.resolve();
  const sigrisk::PortfolioSpec portfolio = load_portfolio(portfolio_path);

  sigrisk::TruncatedTensor phi = [&]() {
    if (!phi_path.empty())
      return sigrisk::io::tensor_from_json(sigrisk::io::parse_json_file(phi_path));
    if (model_path.empty())
      throw std::runtime_error("stress: need either --phi or --model for the base signature");
    const sigrisk::ModelSpec model = load_model(model_path);
    const sigrisk::AlgebraShape shape(model.n_assets + 1, cfg.depth);
    return sigrisk::expected_signature(
        sigrisk::build_ensemble(sigrisk::generate_paths(model, n, cfg.seed), shape));
  }();
  const sigrisk::AlgebraShape shape = phi.shape();
  if (portfolio.weights.shape() != shape)
    throw std::runtime_error("stress: portfolio and base signature shapes differ");

  sigrisk::BridgeOperator base_bridge(sigrisk::identity(shape), "base");
  if (!bridge_path.empty())
    base_bridge = sigrisk::BridgeOperator(
        sigrisk::io::group_from_json(sigrisk::io::parse_json_file(bridge_path)), "base");

  std::vector<fs::path> files;
  const fs::path scenarios(scenario_path);
  if (fs::is_directory(scenarios)) {
    for (const auto& entry : fs::directory_iterator(scenarios))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(scenarios);
  }
  if (files.empty()) throw std::runtime_error("stress: no scenario files found");

  const double base_value =
      sigrisk::inner_product(portfolio.weights, sigrisk::apply_bridge(phi, base_bridge));

  std::ostringstream csv;
  csv << "scenario,portfolio,delta_v,generator_norm,resilient\n";
  for (const auto& file : files) {
    const sigrisk::StressScenario scenario = sigrisk::io::scenario_from_json(
        sigrisk::io::parse_json_file(file), shape, phi, cfg.level_weights);
    const sigrisk::BridgeOperator stressed_bridge =
        sigrisk::compose_stress(base_bridge, scenario.perturbation);
    const double stressed_value =
        sigrisk::inner_product(portfolio.weights, sigrisk::apply_bridge(phi, stressed_bridge));
    const sigrisk::ResilienceResult res = sigrisk::resilience_check(scenario, rho);
    csv << scenario.name << ',' << portfolio.label << ','
        << format_double(stressed_value - base_value) << ','
        << format_double(res.generator_norm) << ',' << (res.resilient ? "true" : "false")
        << '\n';
  }
  emit_report(global.out, csv.str());
  return 0;
}

// ------------------------------------------------------------- monitor ----

int cmd_monitor(const GlobalOptions& global, const std::string& ticks_path,
                const std::string& model_path, const std::string& wg_path, double gamma,
                double div_threshold, double td_threshold, int n, const std::string& reward_mode,
                const std::string& events_path, const std::string& time_format,
                const std::string& price_transform, bool profile) {
  const sigrisk::EngineConfig cfg = global.resolve();
  const sigrisk::ModelSpec model = load_model(model_path);
  const sigrisk::AlgebraShape shape(model.n_assets + 1, cfg.depth);

  sigrisk::io::TickFormat format = cfg.tick_format;
  if (!time_format.empty()) format.time = sigrisk::io::time_format_from_string(time_format);
  if (!price_transform.empty())
    format.transform = sigrisk::io::price_transform_from_string(price_transform);

  // Expected-flow model from the generator: ensemble flows on the model grid.
  const auto paths = sigrisk::generate_paths(model, n, cfg.seed);
  const sigrisk::SignatureEnsemble ens =
      sigrisk::build_ensemble(paths, shape, uniform_grid(model.horizon, model.steps), cfg.seed);
  const sigrisk::EnsembleFlowModel flow_model(ens, asset_mean_rates(model));

  sigrisk::PortfolioSpec sensitivity =
      wg_path.empty() ? sigrisk::PortfolioSpec(sigrisk::TruncatedTensor(shape), 0.0, "w_G")
                      : load_portfolio(wg_path);
  const sigrisk::RewardMode reward = reward_mode == "step_pnl" ? sigrisk::RewardMode::step_pnl
                                                               : sigrisk::RewardMode::zero;

  // Streaming replay: rows are consumed one by one so out-of-order ticks are
  // rejected by the monitor rather than failing the whole file.
  std::ifstream file_stream;
  std::istream* in = &std::cin;
  if (ticks_path != "-") {
    file_stream.open(ticks_path);
    if (!file_stream) throw std::runtime_error("cannot open " + ticks_path);
    in = &file_stream;
  }
  std::string line;
  if (!std::getline(*in, line)) throw std::runtime_error("monitor: empty tick stream");
  if (line.rfind("time", 0) != 0)
    throw std::runtime_error("monitor: tick stream must start with a 'time,...' header");

  std::ofstream events_file;
  std::ostream* events = nullptr;
  if (!events_path.empty()) {
    events_file.open(events_path, std::ios::trunc);
    if (!events_file) throw std::runtime_error("cannot write " + events_path);
    events = &events_file;
  }

  auto parse_row = [&](const std::string& row, std::vector<double>& values) -> double {
    values.clear();
    std::istringstream ss(row);
    std::string field;
    bool first = true;
    double time = 0.0;
    while (std::getline(ss, field, ',')) {
      if (first) {
        time = format.time == sigrisk::io::TimeFormat::iso8601
                   ? sigrisk::io::iso8601_to_year_fraction(field)
                   : std::stod(field);
        first = false;
      } else {
        double v = std::stod(field);
        if (format.transform == sigrisk::io::PriceTransform::log_price) {
          if (!(v > 0.0)) throw std::runtime_error("monitor: log transform needs positive prices");
          v = std::log(v);
        }
        values.push_back(v);
      }
    }
    if (static_cast<int>(values.size()) != model.n_assets)
      throw std::runtime_error("monitor: tick row has wrong asset count");
    return time;
  };

  std::vector<double> values;
  if (!std::getline(*in, line)) throw std::runtime_error("monitor: need at least one tick row");
  const double start_time = parse_row(line, values);
  sigrisk::MonitorState monitor(
      sigrisk::RunningSignature(shape, start_time, values), std::move(sensitivity), gamma,
      sigrisk::MonitorThresholds{div_threshold, td_threshold}, reward, cfg.level_weights);
  auto flow_fn = flow_model.make_flow_fn(start_time);

  std::size_t breaches = 0;
  double max_divergence = 0.0;
  double max_td = 0.0;
  std::vector<double> latencies_us;
  const auto clock_start = std::chrono::steady_clock::now();
  while (std::getline(*in, line)) {
    if (line.empty()) continue;
    const double t = parse_row(line, values);
    const auto t0 = std::chrono::steady_clock::now();
    const auto event = monitor.process_tick(t, values, flow_fn);
    const auto t1 = std::chrono::steady_clock::now();
    if (profile)
      latencies_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    if (!event) continue;
    if (events) *events << sigrisk::io::monitor_event_to_json(*event).dump() << '\n';
    if (event->breach != sigrisk::BreachKind::none) ++breaches;
    max_divergence = std::max(max_divergence, event->divergence);
    max_td = std::max(max_td, std::abs(event->td_error));
  }
  const auto clock_end = std::chrono::steady_clock::now();

  const json summary{{"ticks", monitor.event_log().size()},
                     {"rejected", monitor.rejected_ticks()},
                     {"breaches", breaches},
                     {"max_divergence", max_divergence},
                     {"max_td_error", max_td}};
  emit_report(global.out, dump_json(summary));

  if (profile && !latencies_us.empty()) {
    std::sort(latencies_us.begin(), latencies_us.end());
    auto pct = [&](double q) {
      return latencies_us[static_cast<std::size_t>(q * (latencies_us.size() - 1))];
    };
    const json prof{{"p50_us", pct(0.50)},
                    {"p90_us", pct(0.90)},
                    {"p99_us", pct(0.99)},
                    {"count", latencies_us.size()},
                    {"wall_ms", std::chrono::duration<double, std::milli>(clock_end - clock_start)
                                    .count()}};
    std::cerr << "profile " << prof.dump() << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- pla ----

int cmd_pla(const GlobalOptions& global, const std::string& portfolio_path,
            const std::string& series_path, const std::string& hpl_path,
            const sigrisk::PLAThresholds& thresholds) {
  const sigrisk::PortfolioSpec portfolio = load_portfolio(portfolio_path);
  const json series_json = sigrisk::io::parse_json_file(series_path);
  if (!series_json.is_array() || series_json.size() < 2)
    throw std::runtime_error("pla: --series must be a JSON array of at least 2 tensors");
  std::vector<sigrisk::TruncatedTensor> series;
  series.reserve(series_json.size());
  for (const auto& j : series_json) series.push_back(sigrisk::io::tensor_from_json(j));

  std::optional<std::vector<double>> hpl;
  if (!hpl_path.empty()) {
    const json hpl_json = sigrisk::io::parse_json_file(hpl_path);
    if (!hpl_json.is_array()) throw std::runtime_error("pla: --hpl must be a JSON array");
    hpl = hpl_json.get<std::vector<double>>();
  }
  const sigrisk::PLAReport report = sigrisk::pla_test(portfolio, series, hpl, thresholds);
  emit_report(global.out, dump_json(sigrisk::io::pla_report_to_json(report)));
  return 0;
}

// ----------------------------------------------------------------- fit ----

int cmd_fit(const GlobalOptions& global, const std::string& model_path, int n,
            const std::string& payoff_kind, double strike, const std::string& ensemble_path,
            const std::string& payoffs_path, int depth) {
  const sigrisk::EngineConfig cfg = global.resolve();

  std::vector<sigrisk::GroupElement> sigs;
  std::vector<double> payoffs;
  if (!ensemble_path.empty()) {
    const sigrisk::SignatureEnsemble ens =
        sigrisk::io::ensemble_from_json(sigrisk::io::parse_json_file(ensemble_path));
    sigs = ens.members;
    if (payoffs_path.empty())
      throw std::runtime_error("fit: --ensemble needs --payoffs with one value per member");
    const json payoff_json = sigrisk::io::parse_json_file(payoffs_path);
    payoffs = payoff_json.get<std::vector<double>>();
  } else {
    if (model_path.empty())
      throw std::runtime_error("fit: need either --model or --ensemble");
    const sigrisk::ModelSpec model = load_model(model_path);
    const sigrisk::AlgebraShape shape(model.n_assets + 1, cfg.depth);
    const auto paths = sigrisk::generate_paths(model, n, cfg.seed);
    sigs.reserve(paths.size());
    payoffs.reserve(paths.size());
    for (const auto& path : paths) {
      sigs.push_back(sigrisk::compute_signature(path, shape));
      const double terminal = path.row(path.size() - 1)[0] - path.row(0)[0];
      if (payoff_kind == "terminal") {
        payoffs.push_back(terminal);
      } else if (payoff_kind == "square") {
        payoffs.push_back(terminal * terminal);
      } else if (payoff_kind == "asian") {
        double avg = 0.0;
        for (std::size_t m = 0; m < path.size(); ++m) avg += std::exp(path.row(m)[0]);
        avg /= static_cast<double>(path.size());
        payoffs.push_back(std::max(avg - strike, 0.0));
      } else {
        throw std::runtime_error("fit: unknown payoff kind '" + payoff_kind + "'");
      }
    }
  }
  if (depth <= 0) depth = sigs.empty() ? 1 : sigs.front().shape().depth();
  const sigrisk::PayoffFit fit = sigrisk::fit_payoff_weights(payoffs, sigs, depth);
  emit_report(global.out, dump_json(sigrisk::io::payoff_fit_to_json(fit)));
  return 0;
}

// ------------------------------------------------------------- capital ----

int cmd_capital(const GlobalOptions& global, const std::string& portfolio_path,
                const std::string& risk_weights_path, const std::string& fit_path, int level) {
  const sigrisk::PortfolioSpec portfolio = load_portfolio(portfolio_path);
  const sigrisk::AlgebraShape shape = portfolio.weights.shape();

  sigrisk::TruncatedTensor risk_weights(shape);
  if (risk_weights_path.empty() || risk_weights_path == "unit") {
    for (double& v : risk_weights.flat()) v = 1.0;
  } else {
    risk_weights = sigrisk::io::tensor_from_json(sigrisk::io::parse_json_file(risk_weights_path));
  }
  std::optional<sigrisk::PayoffFit> fit;
  if (!fit_path.empty())
    fit = sigrisk::io::payoff_fit_from_json(sigrisk::io::parse_json_file(fit_path));
  if (level <= 0) level = shape.depth();

  const sigrisk::CapitalReport report = sigrisk::capital_charge(portfolio, risk_weights, fit, level);
  emit_report(global.out, dump_json(sigrisk::io::capital_report_to_json(report)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigrisk: signature-based geometric risk engine"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "Engine config JSON (default: $SIGRISK_CONFIG when set)");
  int dim_flag = 0, depth_flag = 0;
  std::uint64_t seed_flag = 0;
  auto* dim_opt = app.add_option("--dim", dim_flag, "Channels including time");
  auto* depth_opt = app.add_option("--depth", depth_flag, "Truncation depth N");
  auto* seed_opt = app.add_option("--seed", seed_flag, "Deterministic seed");
  app.add_option("--out", global.out, "Report path (default stdout)");

  // sign
  auto* sign = app.add_subcommand("sign", "Signature of a tick CSV");
  std::string sign_input, sign_time_format, sign_price_transform, sign_portfolio;
  bool sign_profile = false;
  std::size_t sign_profile_ticks = 1000000;
  sign->add_option("--input", sign_input, "Tick CSV path")->required();
  sign->add_option("--time-format", sign_time_format, "yearfrac|iso8601");
  sign->add_option("--price-transform", sign_price_transform, "raw|log");
  sign->add_flag("--profile", sign_profile, "Print per-tick latency percentiles to stderr");
  sign->add_option("--profile-ticks", sign_profile_ticks, "Synthetic ticks for --profile");
  sign->add_option("--portfolio", sign_portfolio, "Weights used by the --profile valuation");

  // price
  auto* price = app.add_subcommand("price", "Value a portfolio against an expected signature");
  std::string price_portfolio, price_phi;
  price->add_option("--portfolio", price_portfolio, "Portfolio JSON")->required();
  price->add_option("--phi", price_phi, "Expected signature tensor JSON")->required();

  // ses
  auto* ses = app.add_subcommand("ses", "Signature expected shortfall");
  std::string ses_portfolio, ses_model, ses_ensemble, ses_loss_csv, ses_save_ensemble;
  double ses_alpha = 0.975;
  int ses_n = 10000;
  ses->add_option("--portfolio", ses_portfolio, "Portfolio JSON")->required();
  ses->add_option("--model", ses_model, "Model spec JSON");
  ses->add_option("--ensemble", ses_ensemble, "Ensemble JSON (alternative to --model)");
  ses->add_option("--alpha", ses_alpha, "Confidence level in (0,1)");
  ses->add_option("--n", ses_n, "Ensemble size");
  ses->add_option("--loss-csv", ses_loss_csv, "Optional (member,loss) CSV output");
  ses->add_option("--save-ensemble", ses_save_ensemble, "Optional ensemble JSON output");

  // tep
  auto* tep_cmd = app.add_subcommand("tep", "Temporal exposure profile");
  std::string tep_portfolio, tep_model;
  int tep_n = 2000, tep_grid = 0;
  double tep_threshold = 0.0, tep_epsilon = 0.05;
  bool tep_has_threshold = false;
  tep_cmd->add_option("--portfolio", tep_portfolio, "Portfolio JSON")->required();
  tep_cmd->add_option("--model", tep_model, "Model spec JSON")->required();
  tep_cmd->add_option("--n", tep_n, "Ensemble size");
  tep_cmd->add_option("--grid-points", tep_grid, "Flow grid points (default: model steps)");
  auto* thr = tep_cmd->add_option("--threshold", tep_threshold, "Solvency threshold Z");
  tep_cmd->add_option("--epsilon", tep_epsilon, "Solvency tolerance in (0,1)");
  tep_cmd->callback([&]() { tep_has_threshold = thr->count() > 0; });

  // stress
  auto* stress = app.add_subcommand("stress", "Run stress scenarios against a portfolio");
  std::string stress_portfolio, stress_scenarios, stress_model, stress_phi, stress_bridge;
  double stress_rho = 1.0;
  int stress_n = 2000;
  stress->add_option("--portfolio", stress_portfolio, "Portfolio JSON")->required();
  stress->add_option("--scenarios", stress_scenarios, "Scenario file or directory")->required();
  stress->add_option("--model", stress_model, "Model spec JSON for the base signature");
  stress->add_option("--phi", stress_phi, "Base expected signature tensor JSON");
  stress->add_option("--bridge", stress_bridge, "Base measure-bridge operator JSON");
  stress->add_option("--rho", stress_rho, "Resilience threshold");
  stress->add_option("--n", stress_n, "Ensemble size when --model is used");

  // monitor
  auto* monitor = app.add_subcommand("monitor", "Streaming geometric-trace monitor");
  std::string mon_ticks, mon_model, mon_wg, mon_reward = "zero", mon_events;
  std::string mon_time_format, mon_price_transform;
  double mon_gamma = 1.0, mon_div = 1e-2, mon_td = 1e-2;
  int mon_n = 128;
  bool mon_profile = false;
  monitor->add_option("--ticks", mon_ticks, "Tick CSV path or '-' for stdin")->required();
  monitor->add_option("--model", mon_model, "Model spec JSON for the expected flow")->required();
  monitor->add_option("--wg", mon_wg, "Sensitivity portfolio JSON (w_G)");
  monitor->add_option("--gamma", mon_gamma, "Discount factor in (0,1]");
  monitor->add_option("--div-threshold", mon_div, "Divergence breach threshold");
  monitor->add_option("--td-threshold", mon_td, "TD-error breach threshold");
  monitor->add_option("--n", mon_n, "Flow-model ensemble size");
  monitor->add_option("--reward", mon_reward, "zero|step_pnl");
  monitor->add_option("--events", mon_events, "JSONL event stream output path");
  monitor->add_option("--time-format", mon_time_format, "yearfrac|iso8601");
  monitor->add_option("--price-transform", mon_price_transform, "raw|log");
  monitor->add_flag("--profile", mon_profile, "Print per-tick latency percentiles to stderr");

  // pla
  auto* pla = app.add_subcommand("pla", "P&L attribution test");
  std::string pla_portfolio, pla_series, pla_hpl;
  sigrisk::PLAThresholds pla_thresholds;
  pla->add_option("--portfolio", pla_portfolio, "Portfolio JSON")->required();
  pla->add_option("--series", pla_series, "JSON array of expected-signature tensors")->required();
  pla->add_option("--hpl", pla_hpl, "Realised HPL JSON array (default: signature-linear)");
  pla->add_option("--spearman-green", pla_thresholds.spearman_green, "Green Spearman bound");
  pla->add_option("--spearman-amber", pla_thresholds.spearman_amber, "Amber Spearman bound");
  pla->add_option("--ks-green", pla_thresholds.ks_green, "Green KS bound");
  pla->add_option("--ks-amber", pla_thresholds.ks_amber, "Amber KS bound");

  // fit
  auto* fit = app.add_subcommand("fit", "Least-squares payoff projection onto signatures");
  std::string fit_model, fit_kind = "terminal", fit_ensemble, fit_payoffs;
  double fit_strike = 1.0;
  int fit_n = 4000, fit_depth = 0;
  fit->add_option("--model", fit_model, "Model spec JSON (generates the sample)");
  fit->add_option("--n", fit_n, "Sample size with --model");
  fit->add_option("--payoff", fit_kind, "terminal|square|asian");
  fit->add_option("--strike", fit_strike, "Asian strike (price units)");
  fit->add_option("--ensemble", fit_ensemble, "Ensemble JSON (alternative to --model)");
  fit->add_option("--payoffs", fit_payoffs, "Payoff JSON array aligned with --ensemble");
  fit->add_option("--fit-depth", fit_depth, "Regression depth r (default: full depth)");

  // capital
  auto* capital = app.add_subcommand("capital", "Weighted-sensitivity capital charge");
  std::string cap_portfolio, cap_risk_weights = "unit", cap_fit;
  int cap_level = 0;
  capital->add_option("--portfolio", cap_portfolio, "Portfolio JSON")->required();
  capital->add_option("--risk-weights", cap_risk_weights, "Risk-weight tensor JSON or 'unit'");
  capital->add_option("--fit", cap_fit, "Payoff fit JSON for the RRAO residual");
  capital->add_option("--level", cap_level, "Hedge level r (default: full depth)");

  CLI11_PARSE(app, argc, argv);

  if (dim_opt->count()) global.dim = dim_flag;
  if (depth_opt->count()) global.depth = depth_flag;
  if (seed_opt->count()) global.seed = seed_flag;

  try {
    if (*sign)
      return cmd_sign(global, sign_input, sign_time_format, sign_price_transform, sign_profile,
                      sign_portfolio, sign_profile_ticks);
    if (*price) return cmd_price(global, price_portfolio, price_phi);
    if (*ses)
      return cmd_ses(global, ses_portfolio, ses_model, ses_ensemble, ses_alpha, ses_n,
                     ses_loss_csv, ses_save_ensemble);
    if (*tep_cmd)
      return cmd_tep(global, tep_portfolio, tep_model, tep_n, tep_grid,
                     tep_has_threshold ? std::optional<double>(tep_threshold) : std::nullopt,
                     tep_epsilon);
    if (*stress)
      return cmd_stress(global, stress_portfolio, stress_scenarios, stress_model, stress_phi,
                        stress_bridge, stress_rho, stress_n);
    if (*monitor)
      return cmd_monitor(global, mon_ticks, mon_model, mon_wg, mon_gamma, mon_div, mon_td, mon_n,
                         mon_reward, mon_events, mon_time_format, mon_price_transform,
                         mon_profile);
    if (*pla) return cmd_pla(global, pla_portfolio, pla_series, pla_hpl, pla_thresholds);
    if (*fit)
      return cmd_fit(global, fit_model, fit_n, fit_kind, fit_strike, fit_ensemble, fit_payoffs,
                     fit_depth);
    if (*capital) return cmd_capital(global, cap_portfolio, cap_risk_weights, cap_fit, cap_level);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
