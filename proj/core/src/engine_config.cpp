#include "sigrisk/engine_config.hpp"

#include <stdexcept>

#include "sigrisk/serialization.hpp"

namespace sigrisk {

void EngineConfig::validate() const {
  if (dim < 2)
    throw std::invalid_argument(
        "EngineConfig: dim must be >= 2 (time channel plus at least one asset)");
  if (depth < 1) throw std::invalid_argument("EngineConfig: depth must be >= 1");
  if (!level_weights.empty()) {
    if (static_cast<int>(level_weights.size()) != depth + 1)
      throw std::invalid_argument("EngineConfig: level_weights needs depth+1 entries");
    for (double w : level_weights)
      if (!(w > 0.0)) throw std::invalid_argument("EngineConfig: level_weights must be positive");
  }
}

EngineConfig EngineConfig::from_json_file(const std::filesystem::path& path) {
  const io::json j = io::parse_json_file(path);
  if (!j.is_object()) throw std::runtime_error(path.string() + ": config must be an object");
  EngineConfig cfg;
  cfg.dim = j.value("dim", cfg.dim);
  cfg.depth = j.value("depth", cfg.depth);
  if (j.contains("time_format"))
    cfg.tick_format.time = io::time_format_from_string(j["time_format"].get<std::string>());
  if (j.contains("price_transform"))
    cfg.tick_format.transform =
        io::price_transform_from_string(j["price_transform"].get<std::string>());
  if (j.contains("level_weights"))
    cfg.level_weights = j["level_weights"].get<std::vector<double>>();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.model_file = j.value("model_file", cfg.model_file);
  cfg.portfolio_file = j.value("portfolio_file", cfg.portfolio_file);
  cfg.scenario_dir = j.value("scenario_dir", cfg.scenario_dir);
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace sigrisk
