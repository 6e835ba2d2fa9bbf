#include "foscan/estimation.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "foscan/state_space.hpp"

namespace foscan {

double estimate_r(std::span<const double> training, Warnings* warnings) {
  if (training.size() < 2) {
    throw Error(ErrorCode::InsufficientData,
                "observation variance needs at least 2 training values");
  }
  double mean = 0.0;
  for (double v : training) mean += v;
  mean /= static_cast<double>(training.size());
  double ss = 0.0;
  for (double v : training) ss += (v - mean) * (v - mean);
  const double r = ss / static_cast<double>(training.size() - 1);
  if (r == 0.0) {
    warn(warnings, WarningCode::DegenerateVariance,
         "training values are constant; observation variance is 0");
  }
  return r;
}

double estimate_r(std::span<const Value> training, Warnings* warnings) {
  std::vector<double> present;
  present.reserve(training.size());
  for (const auto& v : training) {
    if (v) present.push_back(*v);
  }
  return estimate_r(std::span<const double>(present), warnings);
}

double aic(double log_lik, int n_params) { return -2.0 * log_lik + 2.0 * n_params; }

std::pair<FittedModel, FitTrace> grid_search_q(const TimeSeries& series,
                                               const ModelSpec& spec, double r) {
  spec.validate();
  const auto needed = static_cast<std::size_t>(spec.order + 2);
  if (series.observed_count() < needed) {
    throw Error(ErrorCode::InsufficientData,
                "series '" + series.name() + "' has " +
                    std::to_string(series.observed_count()) +
                    " observed training values; order " +
                    std::to_string(spec.order) + " needs at least " +
                    std::to_string(needed));
  }
  if (static_cast<std::size_t>(spec.burn_in()) >= series.observed_count()) {
    throw Error(ErrorCode::InsufficientData,
                "burn-in " + std::to_string(spec.burn_in()) +
                    " is not below the number of training observations");
  }
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidArgument, "observation variance must be >= 0");
  }

  const StateSpaceMatrices matrices = build_matrices(spec.order);
  const InitialState init = initial_condition(series, spec, r);

  FitTrace trace;
  std::optional<FilterRun> best_run;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::string last_failure;

  for (double ratio : spec.q_grid.points()) {
    const double q = ratio * r;
    double ll = -std::numeric_limits<double>::infinity();
    try {
      FilterRun run =
          kalman_filter(series.values(), matrices, q, r, init, series.first_epoch());
      ll = log_likelihood(run, spec.burn_in());
      if (!std::isfinite(ll)) ll = -std::numeric_limits<double>::infinity();
      // Strict comparison keeps the smaller ratio on ties.
      if (ll > best_ll) {
        best_ll = ll;
        best_run = std::move(run);
        trace.argmax = trace.grid.size();
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericalFailure &&
          e.code() != ErrorCode::InvalidArgument) {
        throw;
      }
      last_failure = e.what();
    }
    trace.grid.push_back({ratio, q, ll});
  }

  if (!best_run) {
    throw Error(ErrorCode::NumericalFailure,
                "no grid point could be evaluated for '" + series.name() +
                    "': " + last_failure);
  }

  FittedModel model;
  model.spec = spec;
  model.q_ratio = trace.grid[trace.argmax].q_ratio;
  model.q_star = trace.grid[trace.argmax].q;
  model.r = r;
  model.log_lik = best_ll;
  model.aic = aic(best_ll);
  model.n_effective = contributing_innovations(*best_run, spec.burn_in());
  model.run = std::move(*best_run);
  model.smoothed = fixed_interval_smoother(model.run);
  model.warnings.insert(model.warnings.end(), model.smoothed.warnings.begin(),
                        model.smoothed.warnings.end());
  return {std::move(model), std::move(trace)};
}

std::pair<FittedModel, FitTrace> fit_model(const TimeSeries& series,
                                           const ModelSpec& spec) {
  Warnings warnings;
  const double r =
      spec.r_override ? *spec.r_override : estimate_r(series.values(), &warnings);
  if (r == 0.0 && !spec.r_override) {
    // Q = q * R would also be 0; nothing left to fit.
    throw Error(ErrorCode::DegenerateVariance,
                "degenerate variance: training values of '" + series.name() +
                    "' are constant");
  }
  auto result = grid_search_q(series, spec, r);
  result.first.warnings.insert(result.first.warnings.begin(), warnings.begin(),
                               warnings.end());
  return result;
}

}  // namespace foscan
