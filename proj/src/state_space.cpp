#include "foscan/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace foscan {
namespace {

void symmetrize(Eigen::MatrixXd& v) { v = 0.5 * (v + v.transpose()).eval(); }

void check_variances(double q, double r) {
  if (!(q >= 0.0) || !(r >= 0.0) || !std::isfinite(q) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidArgument,
                "noise variances must be finite and non-negative");
  }
  if (!(q + r > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "system and observation noise variances are both zero");
  }
}

}  // namespace

StateSpaceMatrices build_matrices(int d) {
  StateSpaceMatrices m;
  m.order = d;
  switch (d) {
    case 1:
      m.F = Eigen::MatrixXd::Ones(1, 1);
      m.G = Eigen::MatrixXd::Ones(1, 1);
      m.H = Eigen::MatrixXd::Ones(1, 1);
      break;
    case 2:
      m.F.resize(2, 2);
      m.F << 2.0, -1.0,
             1.0, 0.0;
      m.G.resize(2, 1);
      m.G << 1.0, 0.0;
      m.H.resize(1, 2);
      m.H << 1.0, 0.0;
      break;
    default:
      throw Error(ErrorCode::UnsupportedOrder,
                  "difference order must be 1 or 2, got " + std::to_string(d));
  }
  return m;
}

InitialState initial_condition(const TimeSeries& series, const ModelSpec& spec,
                               double r) {
  const int d = spec.order;
  if (d != 1 && d != 2) build_matrices(d);  // throws UnsupportedOrder
  const auto values = series.values();
  const auto first = std::find_if(values.begin(), values.end(),
                                  [](const Value& v) { return v.has_value(); });
  if (first == values.end()) {
    throw Error(ErrorCode::InsufficientData,
                "series '" + series.name() + "' has no observed values");
  }
  if (spec.init_mode == InitMode::Zero) {
    return {Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
  }
  return {Eigen::VectorXd::Constant(d, **first),
          kDiffuseScale * r * Eigen::MatrixXd::Identity(d, d)};
}

FilterRun kalman_filter(std::span<const Value> y, const StateSpaceMatrices& m,
                        double q, double r, const InitialState& init,
                        Epoch first_epoch) {
  check_variances(q, r);
  const auto d = m.F.rows();
  if (init.mean.size() != d || init.var.rows() != d || init.var.cols() != d) {
    throw Error(ErrorCode::InvalidArgument,
                "initial state dimension does not match the model order");
  }
  if (y.empty()) {
    throw Error(ErrorCode::InsufficientData, "empty series passed to the filter");
  }

  FilterRun run;
  run.matrices = m;
  run.q = q;
  run.r = r;
  run.first_epoch = first_epoch;
  run.steps.reserve(y.size());

  const Eigen::MatrixXd system_noise = m.G * q * m.G.transpose();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);

  for (std::size_t n = 0; n < y.size(); ++n) {
    FilterStep step;
    if (n == 0) {
      step.predicted_state = init.mean;
      step.predicted_var = init.var;
    } else {
      const FilterStep& prev = run.steps.back();
      step.predicted_state = m.F * prev.filtered_state;
      step.predicted_var =
          m.F * prev.filtered_var * m.F.transpose() + system_noise;
    }
    symmetrize(step.predicted_var);

    step.innovation_var = (m.H * step.predicted_var * m.H.transpose())(0, 0) + r;
    step.observed = y[n].has_value();
    if (!step.observed) {
      step.filtered_state = step.predicted_state;
      step.filtered_var = step.predicted_var;
      step.gain = Eigen::VectorXd::Zero(d);
      run.steps.push_back(std::move(step));
      continue;
    }

    if (!(step.innovation_var > 0.0) || !std::isfinite(step.innovation_var)) {
      throw Error(ErrorCode::NumericalFailure,
                  "innovation variance is not positive at epoch " +
                      std::to_string(first_epoch + static_cast<Epoch>(n)));
    }
    step.gain = step.predicted_var * m.H.transpose() / step.innovation_var;
    step.innovation = *y[n] - (m.H * step.predicted_state)(0);
    step.filtered_state = step.predicted_state + step.gain * step.innovation;
    step.filtered_var = (identity - step.gain * m.H) * step.predicted_var;
    symmetrize(step.filtered_var);
    run.steps.push_back(std::move(step));
  }
  return run;
}

int contributing_innovations(const FilterRun& run, int burn_in) {
  const int observed = static_cast<int>(run.observed_count());
  return std::max(0, observed - std::max(0, burn_in));
}

double log_likelihood(const FilterRun& run, int burn_in) {
  if (burn_in < 0) {
    throw Error(ErrorCode::InvalidArgument, "burn-in must be non-negative");
  }
  if (contributing_innovations(run, burn_in) < 1) {
    throw Error(ErrorCode::InsufficientData,
                "burn-in " + std::to_string(burn_in) +
                    " leaves no innovations for the likelihood");
  }
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  int seen = 0;
  for (const auto& step : run.steps) {
    if (!step.observed) continue;
    if (seen++ < burn_in) continue;
    total -= 0.5 * (log_2pi + std::log(step.innovation_var) +
                    step.innovation * step.innovation / step.innovation_var);
  }
  return total;
}

SmoothedTrajectory fixed_interval_smoother(const FilterRun& run) {
  SmoothedTrajectory out;
  const std::size_t count = run.steps.size();
  if (count == 0) return out;
  out.means.resize(count);
  out.vars.resize(count);
  out.means[count - 1] = run.steps.back().filtered_state;
  out.vars[count - 1] = run.steps.back().filtered_var;

  const Eigen::MatrixXd& F = run.matrices.F;
  int singular_steps = 0;
  for (std::size_t k = count - 1; k-- > 0;) {
    const FilterStep& cur = run.steps[k];
    const FilterStep& next = run.steps[k + 1];

    // A(n) = V(n|n) F' V(n+1|n)^-1; V(n+1|n) is symmetric so A' solves
    // V(n+1|n) A' = F V(n|n).
    Eigen::MatrixXd rhs = F * cur.filtered_var;
    Eigen::MatrixXd gain_t;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(next.predicted_var);
    if (lu.isInvertible()) {
      gain_t = lu.solve(rhs);
    } else {
      ++singular_steps;
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
          next.predicted_var);
      gain_t = cod.pseudoInverse() * rhs;
    }
    const Eigen::MatrixXd gain = gain_t.transpose();

    out.means[k] = cur.filtered_state +
                   gain * (out.means[k + 1] - next.predicted_state);
    out.vars[k] = cur.filtered_var +
                  gain * (out.vars[k + 1] - next.predicted_var) * gain.transpose();
    symmetrize(out.vars[k]);
  }
  if (singular_steps > 0) {
    warn(&out.warnings, WarningCode::SingularPredictedVariance,
         "predicted state variance singular at " +
             std::to_string(singular_steps) +
             " smoother step(s); used pseudo-inverse");
  }
  return out;
}

ForecastDistribution multistep_predict(const FilterRun& run, int horizon) {
  if (horizon < 1) {
    throw Error(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
  }
  if (run.steps.empty()) {
    throw Error(ErrorCode::InsufficientData, "cannot forecast from an empty run");
  }
  const auto& m = run.matrices;
  const Eigen::MatrixXd system_noise = m.G * run.q * m.G.transpose();

  ForecastDistribution fd;
  fd.base_epoch = run.last_epoch();
  fd.mean.reserve(static_cast<std::size_t>(horizon));
  fd.var.reserve(static_cast<std::size_t>(horizon));

  Eigen::VectorXd state = run.terminal_state();
  Eigen::MatrixXd var = run.terminal_var();
  for (int j = 1; j <= horizon; ++j) {
    state = m.F * state;
    var = m.F * var * m.F.transpose() + system_noise;
    symmetrize(var);
    fd.mean.push_back((m.H * state)(0));
    fd.var.push_back((m.H * var * m.H.transpose())(0, 0) + run.r);
  }
  return fd;
}

}  // namespace foscan
