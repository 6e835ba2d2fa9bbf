#pragma once

#include <span>
#include <utility>
#include <vector>

#include "foscan/core_types.hpp"

namespace foscan {

struct GridPoint {
  double q_ratio;
  double q;
  /// -infinity when the filter failed numerically at this point.
  double log_lik;
};

struct FitTrace {
  std::vector<GridPoint> grid;
  std::size_t argmax = 0;
};

inline constexpr int kModelParameters = 3;  // (d, system variance, observation variance)

/// Sample variance (N-1 denominator) of the present values. A zero result
/// records DegenerateVariance. Throws InsufficientData below two values.
double estimate_r(std::span<const Value> training, Warnings* warnings = nullptr);
double estimate_r(std::span<const double> training, Warnings* warnings = nullptr);

/// Evaluates the likelihood at Q = q * r for every grid ratio and returns the
/// fully populated model at the best point (filter run, smoothed trajectory,
/// AIC). Ties go to the smaller ratio. Grid points whose filter fails
/// numerically are recorded as -infinity.
///
/// `series` is the training window. Throws InsufficientData when it holds
/// fewer than order + 2 observed values or when the burn-in leaves nothing
/// to score, and NumericalFailure when no grid point can be evaluated.
std::pair<FittedModel, FitTrace> grid_search_q(const TimeSeries& series,
                                               const ModelSpec& spec, double r);

/// Estimates r (or takes spec.r_override) and runs grid_search_q.
std::pair<FittedModel, FitTrace> fit_model(const TimeSeries& series,
                                           const ModelSpec& spec);

double aic(double log_lik, int n_params = kModelParameters);

}  // namespace foscan
