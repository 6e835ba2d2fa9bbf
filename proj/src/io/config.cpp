#include "foscan/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace foscan::io {
namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error("config key '" + key + "' has the wrong type");
  }
}

int get_int(const Json& j, const std::string& key) {
  if (!j.at(key).is_number_integer()) {
    config_error("config key '" + key + "' must be an integer");
  }
  return get_as<int>(j, key);
}

double get_number(const Json& j, const std::string& key) {
  if (!j.at(key).is_number()) config_error("config key '" + key + "' must be a number");
  return get_as<double>(j, key);
}

QGrid parse_grid(const Json& j, QGrid grid) {
  check_keys(j, {"min", "max", "step"}, "qGrid");
  if (j.contains("min")) grid.min = get_number(j, "min");
  if (j.contains("max")) grid.max = get_number(j, "max");
  if (j.contains("step")) grid.step = get_number(j, "step");
  return grid;
}

InitMode parse_mode(const Json& j, const std::string& key) {
  return parse_init_mode(get_as<std::string>(j, key));
}

std::optional<double> parse_r_override(const Json& j) {
  if (j.at("rOverride").is_null()) return std::nullopt;
  return get_number(j, "rOverride");
}

SeriesOverride parse_override(const Json& j, const QGrid& base_grid) {
  check_keys(j, {"order", "qGrid", "trainEnd", "horizon", "burnIn", "initMode",
                 "rOverride"},
             "override");
  SeriesOverride o;
  if (j.contains("order")) o.order = get_int(j, "order");
  if (j.contains("qGrid")) o.q_grid = parse_grid(j.at("qGrid"), base_grid);
  if (j.contains("trainEnd")) o.train_end = get_int(j, "trainEnd");
  if (j.contains("horizon")) o.horizon = get_int(j, "horizon");
  if (j.contains("burnIn")) o.burn_in = get_int(j, "burnIn");
  if (j.contains("initMode")) o.init_mode = parse_mode(j, "initMode");
  if (j.contains("rOverride")) o.r_override = parse_r_override(j);
  return o;
}

}  // namespace

void RunConfig::validate() const {
  if (horizon < 1) config_error("horizon must be >= 1");
  if (order != 1 && order != 2) config_error("order must be 1 or 2");
  q_grid.validate();
  bands.validate();
  if (mc_draws < 1) config_error("mcDraws must be >= 1");
  if (mc_reps < 1) config_error("mcReps must be >= 1");
  if (burn_in && *burn_in < 0) config_error("burnIn must be >= 0");
  if (r_override && !(*r_override >= 0.0)) config_error("rOverride must be >= 0");
  if (jobs < 1) config_error("jobs must be >= 1");
  for (const auto& [name, o] : overrides) {
    if (o.order && *o.order != 1 && *o.order != 2) {
      config_error("override '" + name + "': order must be 1 or 2");
    }
    if (o.q_grid) o.q_grid->validate();
    if (o.horizon && *o.horizon < 1) {
      config_error("override '" + name + "': horizon must be >= 1");
    }
    if (o.burn_in && *o.burn_in < 0) {
      config_error("override '" + name + "': burnIn must be >= 0");
    }
  }
}

bool RunConfig::selects(const std::string& name) const {
  return series.empty() ||
         std::find(series.begin(), series.end(), name) != series.end();
}

int RunConfig::horizon_for(const std::string& name) const {
  const auto it = overrides.find(name);
  if (it != overrides.end() && it->second.horizon) return *it->second.horizon;
  return horizon;
}

ModelSpec RunConfig::model_spec_for(const std::string& name,
                                    Epoch fallback_train_end) const {
  ModelSpec spec;
  spec.order = order;
  spec.q_grid = q_grid;
  spec.init_mode = init_mode;
  spec.likelihood_burn_in = burn_in;
  spec.train_end = train_end.value_or(fallback_train_end);
  spec.r_override = r_override;
  const auto it = overrides.find(name);
  if (it != overrides.end()) {
    const SeriesOverride& o = it->second;
    if (o.order) spec.order = *o.order;
    if (o.q_grid) spec.q_grid = *o.q_grid;
    if (o.train_end) spec.train_end = *o.train_end;
    if (o.burn_in) spec.likelihood_burn_in = *o.burn_in;
    if (o.init_mode) spec.init_mode = *o.init_mode;
    if (o.r_override) spec.r_override = *o.r_override;
  }
  return spec;
}

void apply_json(RunConfig& config, const Json& j) {
  check_keys(j,
             {"trainEnd", "horizon", "order", "qGrid", "bands", "mcDraws", "mcReps",
              "seed", "initMode", "burnIn", "rOverride", "series", "overrides",
              "output", "jobs"},
             "config");
  if (j.contains("trainEnd")) {
    if (j.at("trainEnd").is_null()) {
      config.train_end.reset();
    } else {
      config.train_end = get_int(j, "trainEnd");
    }
  }
  if (j.contains("horizon")) config.horizon = get_int(j, "horizon");
  if (j.contains("order")) config.order = get_int(j, "order");
  if (j.contains("qGrid")) config.q_grid = parse_grid(j.at("qGrid"), config.q_grid);
  if (j.contains("bands")) {
    const Json& b = j.at("bands");
    if (!b.is_array()) config_error("bands must be an array");
    BandSpec spec;
    for (const auto& level : b) {
      check_keys(level, {"label", "multiplier"}, "band");
      spec.levels.push_back(
          {get_as<std::string>(level, "label"), get_number(level, "multiplier")});
    }
    config.bands = std::move(spec);
  }
  if (j.contains("mcDraws")) config.mc_draws = get_int(j, "mcDraws");
  if (j.contains("mcReps")) config.mc_reps = get_int(j, "mcReps");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      config_error("seed must be a non-negative integer");
    }
    config.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("initMode")) config.init_mode = parse_mode(j, "initMode");
  if (j.contains("burnIn")) {
    if (j.at("burnIn").is_null()) {
      config.burn_in.reset();
    } else {
      config.burn_in = get_int(j, "burnIn");
    }
  }
  if (j.contains("rOverride")) config.r_override = parse_r_override(j);
  if (j.contains("series")) {
    config.series = get_as<std::vector<std::string>>(j, "series");
  }
  if (j.contains("overrides")) {
    const Json& o = j.at("overrides");
    if (!o.is_object()) config_error("overrides must be an object");
    for (const auto& [name, value] : o.items()) {
      config.overrides[name] = parse_override(value, config.q_grid);
    }
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    check_keys(o, {"report", "csv", "plots"}, "output");
    if (o.contains("report")) config.output.report = get_as<std::string>(o, "report");
    if (o.contains("csv")) config.output.csv = get_as<std::string>(o, "csv");
    if (o.contains("plots")) config.output.plots = get_as<std::string>(o, "plots");
  }
  if (j.contains("jobs")) config.jobs = get_int(j, "jobs");
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    config_error("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  apply_json(base, j);
  base.validate();
  return base;
}

Json analysis_settings_json(const RunConfig& config) {
  Json j;
  j["trainEnd"] = config.train_end ? Json(*config.train_end) : Json(nullptr);
  j["horizon"] = config.horizon;
  j["order"] = config.order;
  j["qGrid"] = {{"min", config.q_grid.min},
                {"max", config.q_grid.max},
                {"step", config.q_grid.step}};
  Json bands = Json::array();
  for (const auto& level : config.bands.levels) {
    bands.push_back({{"label", level.label}, {"multiplier", level.multiplier}});
  }
  j["bands"] = std::move(bands);
  j["mcDraws"] = config.mc_draws;
  j["mcReps"] = config.mc_reps;
  j["seed"] = config.seed;
  j["initMode"] = std::string(to_string(config.init_mode));
  j["burnIn"] = config.burn_in ? Json(*config.burn_in) : Json(nullptr);
  j["rOverride"] = config.r_override ? Json(*config.r_override) : Json(nullptr);
  j["series"] = config.series;
  Json overrides = Json::object();
  for (const auto& [name, o] : config.overrides) {
    Json item = Json::object();
    if (o.order) item["order"] = *o.order;
    if (o.q_grid) {
      item["qGrid"] = {{"min", o.q_grid->min},
                       {"max", o.q_grid->max},
                       {"step", o.q_grid->step}};
    }
    if (o.train_end) item["trainEnd"] = *o.train_end;
    if (o.horizon) item["horizon"] = *o.horizon;
    if (o.burn_in) item["burnIn"] = *o.burn_in;
    if (o.init_mode) item["initMode"] = std::string(to_string(*o.init_mode));
    if (o.r_override) item["rOverride"] = *o.r_override;
    overrides[name] = std::move(item);
  }
  j["overrides"] = std::move(overrides);
  return j;
}

BandSpec parse_bands(const std::string& text) {
  // "95%:1.96,80%:1.28,~70%:1"
  BandSpec spec;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      config_error("band '" + item + "' must look like label:multiplier");
    }
    const std::string number = item.substr(colon + 1);
    double multiplier = 0.0;
    const auto [ptr, ec] =
        std::from_chars(number.data(), number.data() + number.size(), multiplier);
    if (ec != std::errc() || ptr != number.data() + number.size()) {
      config_error("band '" + item + "' has a bad multiplier");
    }
    spec.levels.push_back({item.substr(0, colon), multiplier});
  }
  spec.validate();
  return spec;
}

}  // namespace foscan::io
