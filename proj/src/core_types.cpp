#include "foscan/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace foscan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::EpochMismatch: return "EpochMismatch";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(WarningCode code) {
  switch (code) {
    case WarningCode::DegenerateVariance: return "DegenerateVariance";
    case WarningCode::SingularPredictedVariance:
      return "SingularPredictedVariance";
    case WarningCode::DegenerateSd: return "DegenerateSd";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// TimeSeries

TimeSeries::TimeSeries(std::string name, Epoch first_epoch,
                       std::vector<Value> values, std::string units)
    : name_(std::move(name)),
      units_(std::move(units)),
      first_epoch_(first_epoch),
      values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] && !std::isfinite(*values_[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "series '" + name_ + "': non-finite value at " +
                      std::to_string(epoch(i)));
    }
  }
}

TimeSeries TimeSeries::from_points(std::string name,
                                   std::vector<std::pair<Epoch, Value>> points,
                                   std::string units) {
  if (points.empty()) return TimeSeries(std::move(name), 0, {}, std::move(units));
  std::map<Epoch, Value> by_epoch;
  for (const auto& [e, v] : points) {
    if (!by_epoch.emplace(e, v).second) {
      throw Error(ErrorCode::ParseError, "duplicate year " + std::to_string(e));
    }
  }
  const Epoch first = by_epoch.begin()->first;
  const Epoch last = by_epoch.rbegin()->first;
  std::vector<Value> values(static_cast<std::size_t>(last - first) + 1);
  for (const auto& [e, v] : by_epoch) values[static_cast<std::size_t>(e - first)] = v;
  return TimeSeries(std::move(name), first, std::move(values), std::move(units));
}

Value TimeSeries::at_epoch(Epoch e) const {
  if (!contains(e)) return std::nullopt;
  return values_[static_cast<std::size_t>(e - first_epoch_)];
}

std::size_t TimeSeries::observed_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [](const Value& v) { return v.has_value(); }));
}

std::vector<double> TimeSeries::observed_values() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& v : values_) {
    if (v) out.push_back(*v);
  }
  return out;
}

TimeSeries TimeSeries::slice(Epoch from, Epoch to) const {
  if (empty()) return TimeSeries(name_, from, {}, units_);
  const Epoch lo = std::max(from, first_epoch_);
  const Epoch hi = std::min(to, last_epoch());
  if (lo > hi) return TimeSeries(name_, lo, {}, units_);
  std::vector<Value> values(values_.begin() + (lo - first_epoch_),
                            values_.begin() + (hi - first_epoch_) + 1);
  return TimeSeries(name_, lo, std::move(values), units_);
}

TimeSeries TimeSeries::trimmed() const {
  auto first = std::find_if(values_.begin(), values_.end(),
                            [](const Value& v) { return v.has_value(); });
  if (first == values_.end()) return TimeSeries(name_, first_epoch_, {}, units_);
  auto last = std::find_if(values_.rbegin(), values_.rend(),
                           [](const Value& v) { return v.has_value(); });
  const auto lo = static_cast<Epoch>(first - values_.begin());
  const auto hi = static_cast<Epoch>(values_.rend() - last) - 1;
  return slice(first_epoch_ + lo, first_epoch_ + hi);
}

// ---------------------------------------------------------------------------
// Model configuration

std::string_view to_string(InitMode mode) {
  return mode == InitMode::Diffuse ? "diffuse" : "zero";
}

InitMode parse_init_mode(std::string_view text) {
  if (text == "diffuse" || text == "DIFFUSE") return InitMode::Diffuse;
  if (text == "zero" || text == "ZERO") return InitMode::Zero;
  throw Error(ErrorCode::ConfigError,
              "unknown init mode '" + std::string(text) +
                  "' (expected diffuse or zero)");
}

void QGrid::validate() const {
  if (!(min > 0.0) || !(max > 0.0) || !(step > 0.0) || !std::isfinite(max) ||
      !std::isfinite(step)) {
    throw Error(ErrorCode::ConfigError, "q grid bounds and step must be positive");
  }
  if (min > max) throw Error(ErrorCode::ConfigError, "q grid min exceeds max");
}

std::vector<double> QGrid::points() const {
  validate();
  const auto count =
      static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(min + static_cast<double>(k) * step);
  }
  return out;
}

void ModelSpec::validate() const {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::UnsupportedOrder,
                "difference order must be 1 or 2, got " + std::to_string(order));
  }
  q_grid.validate();
  if (burn_in() < 0) throw Error(ErrorCode::ConfigError, "burn-in must be >= 0");
  if (r_override && !(*r_override >= 0.0 && std::isfinite(*r_override))) {
    throw Error(ErrorCode::ConfigError, "R override must be a finite value >= 0");
  }
}

// ---------------------------------------------------------------------------

std::size_t FilterRun::observed_count() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(), [](const FilterStep& s) { return s.observed; }));
}

std::vector<TrendPoint> FittedModel::smoothed_trend() const {
  std::vector<TrendPoint> out;
  out.reserve(smoothed.means.size());
  for (std::size_t n = 0; n < smoothed.means.size(); ++n) {
    out.push_back({run.first_epoch + static_cast<Epoch>(n), smoothed.means[n](0),
                   smoothed.vars[n](0, 0)});
  }
  return out;
}

double ForecastDistribution::sd(int j) const {
  return std::sqrt(std::max(0.0, var.at(static_cast<std::size_t>(j - 1))));
}

BandSpec BandSpec::defaults() {
  return BandSpec{{{"95%", 1.96}, {"80%", 1.28}, {"~70%", 1.0}}};
}

void BandSpec::validate() const {
  if (levels.empty()) throw Error(ErrorCode::ConfigError, "band spec is empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i].multiplier > 0.0) || !std::isfinite(levels[i].multiplier)) {
      throw Error(ErrorCode::ConfigError,
                  "band '" + levels[i].label + "' needs a positive multiplier");
    }
    if (i > 0 && !(levels[i].multiplier < levels[i - 1].multiplier)) {
      throw Error(ErrorCode::ConfigError,
                  "band multipliers must be strictly decreasing");
    }
  }
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::Above: return "above";
    case Side::Below: return "below";
    case Side::On: return "on";
  }
  return "on";
}

}  // namespace foscan
