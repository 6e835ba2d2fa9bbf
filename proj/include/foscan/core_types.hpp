#pragma once

// Shared domain types for trend fitting and flagged-observation analysis.
// Everything here is a value type; algorithms live in the other modules.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "foscan/errors.hpp"

namespace foscan {

using Epoch = int;
using Value = std::optional<double>;

/// Annual series on consecutive epochs. Gaps are stored as missing values,
/// never as absent rows.
class TimeSeries {
 public:
  TimeSeries() = default;

  /// Throws InvalidArgument when a present value is not finite.
  TimeSeries(std::string name, Epoch first_epoch, std::vector<Value> values,
             std::string units = {});

  /// Builds a consecutive series from (epoch, value) points in any order,
  /// filling absent epochs with missing values. Duplicate epochs are a
  /// ParseError naming the year.
  static TimeSeries from_points(std::string name,
                                std::vector<std::pair<Epoch, Value>> points,
                                std::string units = {});

  const std::string& name() const { return name_; }
  const std::string& units() const { return units_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  Epoch first_epoch() const { return first_epoch_; }
  Epoch last_epoch() const {
    return first_epoch_ + static_cast<Epoch>(values_.size()) - 1;
  }
  Epoch epoch(std::size_t i) const {
    return first_epoch_ + static_cast<Epoch>(i);
  }
  bool contains(Epoch e) const {
    return !empty() && e >= first_epoch_ && e <= last_epoch();
  }

  const Value& operator[](std::size_t i) const { return values_[i]; }
  Value at_epoch(Epoch e) const;
  std::span<const Value> values() const { return values_; }

  std::size_t observed_count() const;
  /// Present values in epoch order.
  std::vector<double> observed_values() const;

  /// Sub-series over [from, to] clipped to the stored range; may be empty.
  TimeSeries slice(Epoch from, Epoch to) const;
  /// Drops leading and trailing missing values.
  TimeSeries trimmed() const;

 private:
  std::string name_;
  std::string units_;
  Epoch first_epoch_ = 0;
  std::vector<Value> values_;
};

enum class InitMode { Diffuse, Zero };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view text);

/// Search grid for the system-noise ratio q = Q / R.
struct QGrid {
  double min = 0.05;
  double max = 0.50;
  double step = 0.01;

  void validate() const;
  /// Points min + k*step for k = 0.. while the point does not exceed max
  /// (with a small tolerance for accumulated rounding in max).
  std::vector<double> points() const;
};

struct ModelSpec {
  int order = 2;
  QGrid q_grid;
  InitMode init_mode = InitMode::Diffuse;
  /// Leading observed innovations excluded from the likelihood. Defaults to
  /// the difference order when unset.
  std::optional<int> likelihood_burn_in;
  Epoch train_end = 0;
  /// Fixes the observation variance instead of estimating it.
  std::optional<double> r_override;

  int burn_in() const { return likelihood_burn_in.value_or(order); }
  void validate() const;
};

struct StateSpaceMatrices {
  int order = 0;
  Eigen::MatrixXd F;
  Eigen::MatrixXd G;
  Eigen::MatrixXd H;
};

struct InitialState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd var;
};

struct FilterStep {
  Eigen::VectorXd predicted_state;
  Eigen::MatrixXd predicted_var;
  Eigen::VectorXd filtered_state;
  Eigen::MatrixXd filtered_var;
  bool observed = false;
  // Unobserved steps carry innovation 0, the innovation variance they would
  // have had, and a zero gain.
  double innovation = 0.0;
  double innovation_var = 0.0;
  Eigen::VectorXd gain;
};

struct FilterRun {
  StateSpaceMatrices matrices;
  double q = 0.0;
  double r = 0.0;
  Epoch first_epoch = 0;
  std::vector<FilterStep> steps;

  std::size_t size() const { return steps.size(); }
  Epoch last_epoch() const {
    return first_epoch + static_cast<Epoch>(steps.size()) - 1;
  }
  const Eigen::VectorXd& terminal_state() const {
    return steps.back().filtered_state;
  }
  const Eigen::MatrixXd& terminal_var() const {
    return steps.back().filtered_var;
  }
  std::size_t observed_count() const;
};

struct SmoothedTrajectory {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> vars;
  Warnings warnings;
};

struct TrendPoint {
  Epoch epoch;
  double mean;
  double var;
};

struct FittedModel {
  ModelSpec spec;
  double q_ratio = 0.0;
  double q_star = 0.0;
  double r = 0.0;
  double log_lik = 0.0;
  double aic = 0.0;
  /// Innovations contributing to log_lik (observed steps after burn-in).
  int n_effective = 0;
  FilterRun run;
  SmoothedTrajectory smoothed;
  Warnings warnings;

  std::vector<TrendPoint> smoothed_trend() const;
};

struct ForecastDistribution {
  Epoch base_epoch = 0;
  std::vector<double> mean;
  std::vector<double> var;

  int horizon() const { return static_cast<int>(mean.size()); }
  Epoch epoch(int j) const { return base_epoch + j; }  // j is 1-based
  double sd(int j) const;                              // j is 1-based
};

struct BandLevel {
  std::string label;
  double multiplier;

  bool operator==(const BandLevel&) const = default;
};

struct BandSpec {
  std::vector<BandLevel> levels;

  static BandSpec defaults();
  /// Multipliers must be positive and strictly decreasing.
  void validate() const;
};

enum class Side { Above, Below, On };

std::string_view to_string(Side side);

struct FlagResult {
  Epoch epoch = 0;
  double observed = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double z = 0.0;
  Side side = Side::On;
  std::vector<std::string> outside_levels;
  double p_analytic = 0.0;
  double p_mc = 0.0;
};

struct TendencyResult {
  std::vector<Epoch> epochs;
  std::vector<double> per_year_p;
  double joint_probability = 1.0;
  /// Standard error of joint_probability estimated across replicates.
  double joint_std_error = 0.0;
  /// Product of analytic per-year tail probabilities.
  double analytic_joint = 1.0;
  bool same_side = false;
  int mc_draws = 0;
  int mc_reps = 0;
  std::uint64_t seed = 0;
};

struct BandInterval {
  std::string label;
  double multiplier;
  double lower;
  double upper;
};

struct HorizonBands {
  Epoch epoch;
  double mean;
  double sd;
  std::vector<BandInterval> bands;
};

struct AnomalyPoint {
  Epoch epoch;
  Value value;
};

/// Everything produced for one series by the scan pipeline. A skipped series
/// carries only the name, units, observations and skip reason.
struct FoReport {
  std::string name;
  std::string units;
  std::optional<std::string> skipped;
  TimeSeries observations;
  std::optional<FittedModel> model;
  ForecastDistribution forecast;
  std::vector<HorizonBands> bands;
  std::vector<FlagResult> flags;
  TendencyResult tendency;
  std::vector<AnomalyPoint> anomalies;
  Warnings warnings;
};

}  // namespace foscan
