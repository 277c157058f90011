#pragma once

// Engine-wide configuration: algebra shape, ingestion conventions, level
// weights for the configured norm and the default seed. Loaded from JSON
// (the CLI resolves the path from --config or SIGRISK_CONFIG) and validated
// field by field.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sigrisk/tick_io.hpp"

namespace sigrisk {

struct EngineConfig {
  int dim = 2;
  int depth = 3;
  io::TickFormat tick_format;
  std::vector<double> level_weights;  // empty = unweighted l2
  std::uint64_t seed = 42;
  std::string model_file;
  std::string portfolio_file;
  std::string scenario_dir;

  void validate() const;

  static EngineConfig from_json_file(const std::filesystem::path& path);
  static const char* env_var_name() { return "SIGRISK_CONFIG"; }
};

}  // namespace sigrisk
