#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foscan/core_types.hpp"

namespace foscan::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kConfigEnvVar = "FOSCAN_CONFIG";

/// Per-series replacements for the global model settings.
struct SeriesOverride {
  std::optional<int> order;
  std::optional<QGrid> q_grid;
  std::optional<Epoch> train_end;
  std::optional<int> horizon;
  std::optional<int> burn_in;
  std::optional<InitMode> init_mode;
  std::optional<double> r_override;
};

struct OutputPaths {
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> plots;
};

struct RunConfig {
  std::optional<Epoch> train_end;
  int horizon = 3;
  int order = 2;
  QGrid q_grid;
  BandSpec bands = BandSpec::defaults();
  int mc_draws = 10000;
  int mc_reps = 1000;
  std::uint64_t seed = 12345;
  InitMode init_mode = InitMode::Diffuse;
  std::optional<int> burn_in;
  std::optional<double> r_override;
  std::vector<std::string> series;  // empty selects every column
  std::map<std::string, SeriesOverride> overrides;
  OutputPaths output;
  int jobs = 1;

  /// Throws ConfigError.
  void validate() const;

  bool selects(const std::string& name) const;
  int horizon_for(const std::string& name) const;
  /// Model settings for one series; `fallback_train_end` applies when no
  /// train end is configured.
  ModelSpec model_spec_for(const std::string& name, Epoch fallback_train_end) const;
};

/// Merges a JSON config object into `config`. Unknown keys and wrong types
/// are ConfigErrors.
void apply_json(RunConfig& config, const Json& j);

/// Reads a JSON config file (IoError if unreadable, ConfigError if invalid).
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Analysis settings only (no output paths or job count), in a fixed key
/// order. Feeds the report's meta block.
Json analysis_settings_json(const RunConfig& config);

BandSpec parse_bands(const std::string& text);

}  // namespace foscan::io
