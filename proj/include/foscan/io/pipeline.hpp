#pragma once

#include <vector>

#include "foscan/core_types.hpp"
#include "foscan/io/config.hpp"
#include "foscan/io/panel.hpp"

namespace foscan::io {

/// Full flagged-observation pipeline for one series: split at the train end,
/// estimate R, grid-fit Q, smooth, predict J years ahead, build bands, flag
/// the held-out years, compute tail and joint probabilities, and anomalies.
///
/// Never throws for data problems; a series that cannot be analyzed comes
/// back with `skipped` set.
FoReport analyze_series(const TimeSeries& series, const RunConfig& config);

/// Fit only (no forecast): the model summary per series over data up to the
/// train end, or the last observed year when none is configured.
FoReport fit_series(const TimeSeries& series, const RunConfig& config);

/// Runs analyze_series over every selected column, in panel column order,
/// using config.jobs worker threads. Rejected columns appear as skipped
/// reports. Output is independent of the job count.
std::vector<FoReport> run_scan(const Panel& panel, const RunConfig& config);

std::vector<FoReport> run_fit(const Panel& panel, const RunConfig& config);

}  // namespace foscan::io
