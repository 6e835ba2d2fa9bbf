#pragma once

// Forecast bands, per-year flags, one-sided tail probabilities and the
// averaged joint-probability tendency test.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "foscan/core_types.hpp"

namespace foscan {

/// Deterministic per-stream seeding. Each (master seed, key, index) triple
/// maps to an independent engine so results do not depend on the order in
/// which series or replicates are evaluated.
std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view key,
                                 std::uint64_t index);

using RngEngine = std::mt19937_64;

struct McSettings {
  int draws = 10000;
  int reps = 1000;
  std::uint64_t seed = 20190101;
  /// Stream key, normally the series name.
  std::string key;
};

/// Per horizon, per level: mean -/+ multiplier * sd.
std::vector<HorizonBands> forecast_bands(const ForecastDistribution& fd,
                                         const BandSpec& bands);

/// One-sided Gaussian tail in the direction of the deviation; 0.5 when the
/// observation equals the mean. With sd == 0 and a deviation, returns 0 and
/// records DegenerateSd.
double pvalue_analytic(double observed, double mean, double sd,
                       Warnings* warnings = nullptr);

/// Fraction of `draws` samples from N(mean, sd^2) at least as extreme as
/// `observed` in the direction of the deviation. Ties count as extreme; an
/// observation equal to the mean counts upward.
double pvalue_mc(double observed, double mean, double sd, int draws,
                 RngEngine& rng);

double joint_probability(std::span<const double> p);

/// Flags each observed held-out year against the forecast. `held_out` must
/// cover exactly the forecast epochs (EpochMismatch otherwise); missing
/// values produce no entry. pMc uses a dedicated stream per series.
std::vector<FlagResult> classify_flags(const TimeSeries& held_out,
                                       const ForecastDistribution& fd,
                                       const BandSpec& bands,
                                       const McSettings& mc,
                                       Warnings* warnings = nullptr);

/// Repeats the per-year Monte-Carlo p-values `mc.reps` times, multiplies
/// them within each replicate and averages the products.
TendencyResult averaged_joint_probability(const TimeSeries& held_out,
                                          const ForecastDistribution& fd,
                                          const McSettings& mc);

/// Deviation of every epoch of `series` from the mean of the observed values
/// in [from, to]. Throws EmptyWindow if that window has no observed value.
std::vector<AnomalyPoint> anomalies(const TimeSeries& series, Epoch from,
                                    Epoch to);

}  // namespace foscan
