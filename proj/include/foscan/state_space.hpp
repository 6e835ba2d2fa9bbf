#pragma once

// Stochastic difference trend model in state-space form:
//
//   z(n) = F z(n-1) + G v(n),   v(n) ~ N(0, Q)
//   y(n) = H z(n)   + w(n),     w(n) ~ N(0, R)
//
// with z(n) = t(n) for order 1 and z(n) = (t(n), t(n-1)) for order 2.

#include <span>

#include "foscan/core_types.hpp"

namespace foscan {

/// Throws UnsupportedOrder unless d is 1 or 2.
StateSpaceMatrices build_matrices(int d);

/// Initial prior for z(1) given the training series.
///
/// Diffuse: every state component equals the first observed value and
/// V(1|0) = kDiffuseScale * r * I. Zero: z(1|0) = 0, V(1|0) = 0.
/// Throws InsufficientData when the series has no observed value.
InitialState initial_condition(const TimeSeries& series, const ModelSpec& spec,
                               double r);

inline constexpr double kDiffuseScale = 100.0;

/// Forward Kalman recursion over y. Missing values produce prediction-only
/// steps. Covariances are symmetrized after every update.
///
/// Throws InvalidArgument for negative variances, Q + R == 0 or a
/// dimension mismatch, and NumericalFailure if an innovation variance is
/// not strictly positive.
FilterRun kalman_filter(std::span<const Value> y, const StateSpaceMatrices& m,
                        double q, double r, const InitialState& init,
                        Epoch first_epoch = 0);

/// Gaussian log-likelihood of the observed innovations, skipping the first
/// `burn_in` of them. Throws InsufficientData if nothing remains.
double log_likelihood(const FilterRun& run, int burn_in);

/// Number of innovations that contribute to log_likelihood(run, burn_in).
int contributing_innovations(const FilterRun& run, int burn_in);

/// Fixed-interval (Rauch-Tung-Striebel) smoother. A singular V(n+1|n) falls
/// back to a pseudo-inverse and records SingularPredictedVariance.
SmoothedTrajectory fixed_interval_smoother(const FilterRun& run);

/// j-step-ahead predictive mean H z(n+j|n) and variance H V(n+j|n) H' + R
/// from the terminal filtered state, for j = 1..horizon.
ForecastDistribution multistep_predict(const FilterRun& run, int horizon);

}  // namespace foscan
