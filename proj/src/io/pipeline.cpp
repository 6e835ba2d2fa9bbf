#include "foscan/io/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "foscan/estimation.hpp"
#include "foscan/fo_analysis.hpp"
#include "foscan/state_space.hpp"

namespace foscan::io {
namespace {

FoReport skipped(const TimeSeries& series, std::string reason) {
  FoReport report;
  report.name = series.name();
  report.units = series.units();
  report.observations = series;
  report.skipped = std::move(reason);
  return report;
}

std::string describe(const Error& e) {
  return std::string(to_string(e.code())) + ": " + e.what();
}

std::vector<FoReport> run_parallel(
    const Panel& panel, const RunConfig& config,
    const std::function<FoReport(const TimeSeries&, const RunConfig&)>& analyze) {
  config.validate();
  std::vector<const TimeSeries*> selected;
  for (const auto& s : panel.series) {
    if (config.selects(s.name())) selected.push_back(&s);
  }

  std::vector<FoReport> reports(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      try {
        reports[i] = analyze(*selected[i], config);
      } catch (const std::exception& e) {
        reports[i] = skipped(*selected[i], std::string("internal error: ") + e.what());
      }
    }
  };
  const auto threads = std::min<std::size_t>(
      static_cast<std::size_t>(config.jobs), std::max<std::size_t>(1, selected.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& rejected : panel.rejected) {
    if (!config.selects(rejected.name)) continue;
    FoReport report;
    report.name = rejected.name;
    report.skipped = "ParseError: " + rejected.reason;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace

FoReport fit_series(const TimeSeries& series, const RunConfig& config) {
  const TimeSeries observed = series.trimmed();
  if (observed.empty()) return skipped(series, "no observed values");
  try {
    const ModelSpec spec = config.model_spec_for(series.name(), observed.last_epoch());
    const TimeSeries train = observed.slice(observed.first_epoch(), spec.train_end);
    if (train.empty()) return skipped(series, "no training data before train end");
    FoReport report = skipped(series, "");
    report.skipped.reset();
    report.observations = observed;
    auto [model, trace] = fit_model(train, spec);
    report.warnings = model.warnings;
    report.model = std::move(model);
    return report;
  } catch (const Error& e) {
    return skipped(series, describe(e));
  }
}

FoReport analyze_series(const TimeSeries& series, const RunConfig& config) {
  const TimeSeries observed = series.trimmed();
  if (observed.empty()) return skipped(series, "no observed values");
  try {
    const ModelSpec spec = config.model_spec_for(series.name(), observed.last_epoch());
    const int horizon = config.horizon_for(series.name());
    const auto o = config.overrides.find(series.name());
    if (!config.train_end && (o == config.overrides.end() || !o->second.train_end)) {
      return skipped(series, "train end is not configured");
    }
    if (observed.last_epoch() <= spec.train_end) {
      return skipped(series, "no held-out data");
    }
    if (observed.last_epoch() < spec.train_end + horizon) {
      return skipped(series, "held-out horizon incomplete: series ends at " +
                                 std::to_string(observed.last_epoch()) +
                                 ", forecast needs " +
                                 std::to_string(spec.train_end + horizon));
    }
    if (observed.first_epoch() > spec.train_end) {
      return skipped(series, "no training data before train end");
    }
    const TimeSeries train = observed.slice(observed.first_epoch(), spec.train_end);
    const TimeSeries held_out =
        observed.slice(spec.train_end + 1, spec.train_end + horizon);
    if (held_out.observed_count() == 0) return skipped(series, "no held-out data");

    FoReport report;
    report.name = series.name();
    report.units = series.units();
    report.observations = observed;

    auto [model, trace] = fit_model(train, spec);
    report.warnings = model.warnings;
    report.forecast = multistep_predict(model.run, horizon);
    report.bands = forecast_bands(report.forecast, config.bands);

    McSettings mc;
    mc.draws = config.mc_draws;
    mc.reps = config.mc_reps;
    mc.seed = config.seed;
    mc.key = series.name();
    report.flags =
        classify_flags(held_out, report.forecast, config.bands, mc, &report.warnings);
    report.tendency = averaged_joint_probability(held_out, report.forecast, mc);
    report.anomalies =
        anomalies(observed, observed.first_epoch(), observed.last_epoch());
    report.model = std::move(model);
    return report;
  } catch (const Error& e) {
    return skipped(series, describe(e));
  }
}

std::vector<FoReport> run_scan(const Panel& panel, const RunConfig& config) {
  const bool any_train_end = std::any_of(
      config.overrides.begin(), config.overrides.end(),
      [](const auto& item) { return item.second.train_end.has_value(); });
  if (!config.train_end && !any_train_end) {
    throw Error(ErrorCode::ConfigError, "scan needs a train end year");
  }
  return run_parallel(panel, config, analyze_series);
}

std::vector<FoReport> run_fit(const Panel& panel, const RunConfig& config) {
  return run_parallel(panel, config, fit_series);
}

}  // namespace foscan::io
