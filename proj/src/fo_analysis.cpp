#include "foscan/fo_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace foscan {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Upper tail of the standard normal, accurate far into the tail.
double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

void check_alignment(const TimeSeries& held_out, const ForecastDistribution& fd) {
  if (held_out.empty() || held_out.first_epoch() != fd.base_epoch + 1 ||
      static_cast<int>(held_out.size()) != fd.horizon()) {
    throw Error(ErrorCode::EpochMismatch,
                "held-out epochs do not match forecast horizon " +
                    std::to_string(fd.base_epoch + 1) + ".." +
                    std::to_string(fd.base_epoch + fd.horizon()));
  }
}

void check_mc(const McSettings& mc) {
  if (mc.draws < 1) throw Error(ErrorCode::InvalidArgument, "MC draws must be >= 1");
  if (mc.reps < 1) throw Error(ErrorCode::InvalidArgument, "MC reps must be >= 1");
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view key,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a(key)) + splitmix64(index));
}

std::vector<HorizonBands> forecast_bands(const ForecastDistribution& fd,
                                         const BandSpec& bands) {
  std::vector<HorizonBands> out;
  out.reserve(static_cast<std::size_t>(fd.horizon()));
  for (int j = 1; j <= fd.horizon(); ++j) {
    const double mean = fd.mean[static_cast<std::size_t>(j - 1)];
    const double sd = fd.sd(j);
    HorizonBands hb{fd.epoch(j), mean, sd, {}};
    for (const auto& level : bands.levels) {
      hb.bands.push_back({level.label, level.multiplier,
                          mean - level.multiplier * sd,
                          mean + level.multiplier * sd});
    }
    out.push_back(std::move(hb));
  }
  return out;
}

double pvalue_analytic(double observed, double mean, double sd,
                       Warnings* warnings) {
  if (observed == mean) return 0.5;
  if (!(sd > 0.0)) {
    warn(warnings, WarningCode::DegenerateSd,
         "zero predictive sd with a deviating observation; p set to 0");
    return 0.0;
  }
  const double z = (observed - mean) / sd;
  return upper_tail(std::abs(z));
}

double pvalue_mc(double observed, double mean, double sd, int draws,
                 RngEngine& rng) {
  if (draws < 1) throw Error(ErrorCode::InvalidArgument, "MC draws must be >= 1");
  if (!(sd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sd must be >= 0");
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool upward = observed >= mean;
  int extreme = 0;
  for (int i = 0; i < draws; ++i) {
    const double r = mean + sd * normal(rng);
    if (upward ? r >= observed : r <= observed) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(draws);
}

double joint_probability(std::span<const double> p) {
  double product = 1.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "probabilities must lie in [0, 1]");
    }
    product *= v;
  }
  return product;
}

std::vector<FlagResult> classify_flags(const TimeSeries& held_out,
                                       const ForecastDistribution& fd,
                                       const BandSpec& bands,
                                       const McSettings& mc, Warnings* warnings) {
  check_alignment(held_out, fd);
  check_mc(mc);
  std::vector<FlagResult> out;
  for (int j = 1; j <= fd.horizon(); ++j) {
    const Value& obs = held_out[static_cast<std::size_t>(j - 1)];
    if (!obs) continue;
    FlagResult f;
    f.epoch = fd.epoch(j);
    f.observed = *obs;
    f.mean = fd.mean[static_cast<std::size_t>(j - 1)];
    f.sd = fd.sd(j);
    const double diff = f.observed - f.mean;
    if (diff == 0.0) {
      f.z = 0.0;
    } else if (f.sd > 0.0) {
      f.z = diff / f.sd;
    } else {
      f.z = diff > 0.0 ? HUGE_VAL : -HUGE_VAL;
    }
    f.side = f.z > 0.0 ? Side::Above : (f.z < 0.0 ? Side::Below : Side::On);
    for (const auto& level : bands.levels) {
      if (std::abs(f.z) > level.multiplier) f.outside_levels.push_back(level.label);
    }
    f.p_analytic = pvalue_analytic(f.observed, f.mean, f.sd, warnings);
    RngEngine rng(derive_stream_seed(mc.seed, mc.key + "#flags",
                                     static_cast<std::uint64_t>(j)));
    f.p_mc = pvalue_mc(f.observed, f.mean, f.sd, mc.draws, rng);
    out.push_back(std::move(f));
  }
  return out;
}

TendencyResult averaged_joint_probability(const TimeSeries& held_out,
                                          const ForecastDistribution& fd,
                                          const McSettings& mc) {
  check_alignment(held_out, fd);
  check_mc(mc);

  struct Year {
    double observed, mean, sd;
  };
  std::vector<Year> years;
  TendencyResult result;
  result.mc_draws = mc.draws;
  result.mc_reps = mc.reps;
  result.seed = mc.seed;
  int above = 0;
  int below = 0;
  for (int j = 1; j <= fd.horizon(); ++j) {
    const Value& obs = held_out[static_cast<std::size_t>(j - 1)];
    if (!obs) continue;
    const double mean = fd.mean[static_cast<std::size_t>(j - 1)];
    years.push_back({*obs, mean, fd.sd(j)});
    result.epochs.push_back(fd.epoch(j));
    if (*obs > mean) ++above;
    if (*obs < mean) ++below;
    result.analytic_joint *= pvalue_analytic(*obs, mean, fd.sd(j));
  }
  const int count = static_cast<int>(years.size());
  result.same_side = count > 0 && (above == count || below == count);
  result.per_year_p.assign(years.size(), 0.0);

  // Order of operations matters: multiply within a replicate, then average.
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<double> p(years.size());
  for (int b = 0; b < mc.reps; ++b) {
    RngEngine rng(derive_stream_seed(mc.seed, mc.key, static_cast<std::uint64_t>(b)));
    for (std::size_t j = 0; j < years.size(); ++j) {
      p[j] = pvalue_mc(years[j].observed, years[j].mean, years[j].sd, mc.draws, rng);
      result.per_year_p[j] += p[j];
    }
    const double product = joint_probability(p);
    sum += product;
    sum_sq += product * product;
  }
  const double reps = static_cast<double>(mc.reps);
  for (double& v : result.per_year_p) v /= reps;
  result.joint_probability = sum / reps;
  if (mc.reps > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * sum / reps) / (reps - 1.0));
    result.joint_std_error = std::sqrt(var / reps);
  }
  return result;
}

std::vector<AnomalyPoint> anomalies(const TimeSeries& series, Epoch from,
                                    Epoch to) {
  const TimeSeries window = series.slice(from, to);
  const std::vector<double> present = window.observed_values();
  if (present.empty()) {
    throw Error(ErrorCode::EmptyWindow,
                "anomaly window " + std::to_string(from) + ".." +
                    std::to_string(to) + " has no observed values");
  }
  double mean = 0.0;
  for (double v : present) mean += v;
  mean /= static_cast<double>(present.size());

  std::vector<AnomalyPoint> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Value& v = series[i];
    out.push_back({series.epoch(i), v ? Value(*v - mean) : std::nullopt});
  }
  return out;
}

}  // namespace foscan
