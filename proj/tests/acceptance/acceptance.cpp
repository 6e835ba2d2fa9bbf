// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foscan/estimation.hpp"
#include "foscan/fo_analysis.hpp"
#include "foscan/io/panel.hpp"
#include "foscan/io/pipeline.hpp"
#include "foscan/state_space.hpp"
#include "support/oracle_compare.hpp"
#include "support/simulate.hpp"

namespace fs = std::filesystem;
using namespace foscan;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Randomized oracle equivalence, 200 instances, 1e-8 relative.
Outcome oracle_equivalence() {
  constexpr double kTol = 1e-8;
  std::mt19937_64 rng(0xACCE97);
  std::uniform_real_distribution<double> var(0.01, 10.0);
  std::uniform_int_distribution<int> len(3, 8);
  std::uniform_int_distribution<int> order(1, 2);
  std::uniform_int_distribution<int> horizon(1, 3);
  std::normal_distribution<double> data(0.0, 5.0);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const int d = order(rng);
    const int n = len(rng);
    std::vector<Value> y;
    for (int k = 0; k < n; ++k) y.emplace_back(data(rng));
    const double q = var(rng);
    const double r = var(rng);
    const int burn_in = (i % 2 == 0) ? 0 : std::min(d, n - 1);
    const double err = foscan::testing::worst_oracle_error(d, q, r, y, horizon(rng), burn_in);
    worst = std::max(worst, err);
    if (!(err <= kTol)) ++failures;
  }
  return {failures == 0,
          fmt("200 instances, worst relative error %.3g (tolerance %.0e)", worst, kTol)};
}

// 2. Reference per-year p-values multiply to the reference joint probabilities.
Outcome table_arithmetic() {
  struct Column {
    const char* name;
    std::vector<double> p;
    double reference;
  };
  const std::vector<Column> columns{
      {"AMOS", {0.19, 0.14, 0.29, 0.42, 0.22, 0.28, 0.42}, 8.24e-05},
      {"RFW", {0.22, 0.061, 0.023}, 3.06e-04},
      {"ZooB", {0.12, 0.28, 0.13}, 0.0045},
      {"BWB", {0.13, 0.16, 0.29}, 0.0063},
      {"BWR", {0.1003, 0.1237, 0.1415}, 0.0018},
      {"BWW", {0.12, 0.11, 0.13}, 0.0016},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : columns) {
    const double got = joint_probability(c.p);
    const double rel = got / c.reference - 1.0;
    pass = pass && std::abs(rel) <= 0.15;
    detail += fmt("%s %.3g (%+.1f%%) ", c.name, got, 100.0 * rel);
  }
  return {pass, detail + "tolerance +-15%"};
}

// 3. Monte-Carlo p-values and averaged joint agree with the analytic forms.
Outcome mc_agreement() {
  std::mt19937_64 pick(3003);
  std::uniform_real_distribution<double> mean(-10.0, 10.0);
  std::uniform_real_distribution<double> sd(0.1, 5.0);
  std::uniform_real_distribution<double> z(-2.5, 2.5);
  int within = 0;
  for (int i = 0; i < 50; ++i) {
    const double m = mean(pick);
    const double s = sd(pick);
    const double obs = m + s * z(pick);
    const double pa = pvalue_analytic(obs, m, s);
    RngEngine rng(derive_stream_seed(3003, "criterion-3", static_cast<std::uint64_t>(i)));
    const double pm = pvalue_mc(obs, m, s, 10000, rng);
    if (std::abs(pm - pa) <= 3.0 * std::sqrt(pa * (1.0 - pa) / 10000.0)) ++within;
  }

  bool joint_ok = true;
  std::string joint_detail;
  for (int cfg = 0; cfg < 3; ++cfg) {
    ForecastDistribution fd;
    fd.base_epoch = 2016;
    std::vector<Value> held;
    for (int j = 0; j < 3; ++j) {
      const double m = mean(pick);
      const double s = sd(pick);
      fd.mean.push_back(m);
      fd.var.push_back(s * s);
      held.emplace_back(m + s * z(pick));
    }
    McSettings mc;
    mc.draws = 10000;
    mc.reps = 1000;
    mc.seed = 3003;
    mc.key = "criterion-3-joint-" + std::to_string(cfg);
    const auto t = averaged_joint_probability(TimeSeries("s", 2017, held), fd, mc);
    const double gap = std::abs(t.joint_probability - t.analytic_joint);
    joint_ok = joint_ok && gap <= 3.0 * t.joint_std_error;
    joint_detail += fmt(" %.4g vs %.4g (se %.2g)", t.joint_probability, t.analytic_joint,
                        t.joint_std_error);
  }
  return {within >= 48 && joint_ok,
          fmt("%d/50 p-values within 3 binomial sd (need 48); joint:", within) + joint_detail};
}

// Exact binomial quantile: smallest k with P(X <= k) >= level.
int binomial_quantile(int n, double p, double level) {
  double cdf = 0.0;
  for (int k = 0; k <= n; ++k) {
    cdf += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                    k * std::log(p) + (n - k) * std::log1p(-p));
    if (cdf >= level) return k;
  }
  return n;
}

// 4. Held-out exceedance of the 95% band on simulated d = 2 series.
Outcome band_coverage() {
  constexpr int kSeries = 1000;
  constexpr int kLength = 40;
  constexpr int kHorizon = 3;
  constexpr double kQ = 0.1;  // true system variance; observation variance 1
  io::RunConfig config;
  config.train_end = 1980 + kLength - kHorizon - 1;
  config.horizon = kHorizon;
  config.mc_draws = 1;
  config.mc_reps = 1;
  std::mt19937_64 rng(404);
  int outside = 0;
  int total = 0;
  int outside_true_r = 0;
  for (int i = 0; i < kSeries; ++i) {
    const auto sim = foscan::testing::simulate_trend(2, kQ, 1.0, kLength, rng);
    const auto series = foscan::testing::to_series(sim.observed, 1980, "sim");
    const FoReport r = io::analyze_series(series, config);
    if (r.skipped) return {false, "simulated series skipped: " + *r.skipped};
    for (const auto& f : r.flags) {
      total += 1;
      if (std::find(f.outside_levels.begin(), f.outside_levels.end(), "95%") !=
          f.outside_levels.end()) {
        ++outside;
      }
    }
    // Reference run with R fixed at its true value.
    io::RunConfig known = config;
    known.r_override = 1.0;
    const FoReport k = io::analyze_series(series, known);
    for (const auto& f : k.flags) {
      if (std::abs(f.z) > 1.96) ++outside_true_r;
    }
  }
  const int lo = binomial_quantile(total, 0.05, 0.005);
  const int hi = binomial_quantile(total, 0.05, 0.995);
  const double frac = static_cast<double>(outside) / total;
  const double upper = std::max(0.08, static_cast<double>(hi) / total);
  const double lower = static_cast<double>(lo) / total;
  return {frac >= lower && frac <= upper,
          fmt("default pipeline %.4f outside 95%% (%d/%d); binomial 99%% interval "
              "[%.4f, %.4f], accepted up to %.2f; with true R fixed %.4f",
              frac, outside, total, lower, static_cast<double>(hi) / total, upper,
              static_cast<double>(outside_true_r) / total)};
}

// 5. A level shift over the held-out years is flagged; no shift is not.
Outcome qualitative_findings() {
  io::RunConfig config;
  config.train_end = 2016;
  config.horizon = 3;
  std::mt19937_64 rng(55);
  const auto sim = foscan::testing::simulate_trend(2, 0.1, 1.0, 37, rng, 10.0, 0.2);
  const auto train = foscan::testing::to_series(sim.observed, 1980, "train");
  const auto spec = config.model_spec_for("train", 2016);
  const auto model = fit_model(train, spec).first;
  const auto fd = multistep_predict(model.run, 3);

  double max_sd = 0.0;
  for (int j = 1; j <= 3; ++j) max_sd = std::max(max_sd, fd.sd(j));
  const double shift = 3.0 * max_sd;
  const double sign[] = {1.0, -1.0, 1.0};
  std::vector<Value> base(train.values().begin(), train.values().end());
  std::vector<Value> shifted = base;
  for (int j = 1; j <= 3; ++j) {
    const auto k = static_cast<std::size_t>(j - 1);
    const double v = fd.mean[k] + 0.3 * sign[k] * fd.sd(j);
    base.emplace_back(v);
    shifted.emplace_back(v + shift);
  }
  io::Panel panel;
  panel.series.emplace_back("baseline", 1980, base);
  panel.series.emplace_back("shifted", 1980, shifted);
  const auto reports = io::run_scan(panel, config);
  const FoReport& b = reports[0];
  const FoReport& s = reports[1];
  if (b.skipped || s.skipped) return {false, "scan skipped a series"};

  auto flagged95 = [](const FoReport& r) {
    int n = 0;
    for (const auto& f : r.flags) {
      if (!f.outside_levels.empty() && f.outside_levels.front() == "95%") ++n;
    }
    return n;
  };
  const bool same_forecast = b.forecast.mean == fd.mean && s.forecast.mean == fd.mean;
  const bool pass = same_forecast && flagged95(s) == 3 &&
                    s.tendency.joint_probability < 0.001 && flagged95(b) == 0 &&
                    b.tendency.joint_probability > 0.01;
  return {pass, fmt("shift %.3g: %d/3 flagged at 95%%, joint %.3g; no shift: %d/3 flagged, "
                    "joint %.3g",
                    shift, flagged95(s), s.tendency.joint_probability, flagged95(b),
                    b.tendency.joint_probability)};
}

// 6. Grid search on annual AMO means 1980-2013.
Outcome amo_grid_search() {
  fs::path path;
  if (const char* env = std::getenv("FOSCAN_AMO_CSV"); env && *env) {
    path = env;
  } else {
    path = fs::path(FOSCAN_DATA_DIR) / "amo_annual.csv";
  }
  if (!fs::exists(path)) {
    return {false, "UNVERIFIED: no AMO annual means at " + path.string() +
                       " (set FOSCAN_AMO_CSV to a year,<value> CSV)"};
  }
  const io::Panel panel = io::read_panel(path);
  if (panel.series.empty()) return {false, "no usable column in " + path.string()};
  const TimeSeries train = panel.series.front().trimmed().slice(1980, 2013);
  ModelSpec spec;
  spec.order = 2;
  spec.train_end = 2013;
  const auto model = fit_model(train, spec).first;
  const bool pass = std::abs(model.q_ratio - 0.50) < 1e-9 && std::abs(model.log_lik + 51.2) <= 2.0;
  return {pass, fmt("ratio %.2f (want 0.50), log-likelihood %.2f (want -51.2 +- 2.0)",
                    model.q_ratio, model.log_lik)};
}

std::string run_cli(const std::string& args) {
  const std::string cmd = "'" FOSCAN_CLI_PATH "' " + args + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  return (WIFEXITED(raw) && WEXITSTATUS(raw) == 0) ? "" : "exit " + std::to_string(raw);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. Repeated scans, serial and parallel, are byte-identical.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "foscan_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 rng(77);
  constexpr int kCols = 6;
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < kCols; ++k) {
    cols.push_back(foscan::testing::simulate_trend(2, 0.1, 1.0, 40, rng, k, 0.1).observed);
  }
  {
    std::ofstream csv(dir / "panel.csv");
    csv.precision(17);
    csv << "year";
    for (int k = 0; k < kCols; ++k) csv << ",s" << k;
    csv << '\n';
    for (int i = 0; i < 40; ++i) {
      csv << 1980 + i;
      for (int k = 0; k < kCols; ++k) {
        csv << ',';
        if (!(k == 2 && i == 11)) csv << cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      }
      csv << '\n';
    }
  }
  const std::string panel = (dir / "panel.csv").string();
  const std::string common = "scan '" + panel + "' --train-end 2016 --seed 99 --draws 2000 --reps 100";
  std::string err;
  err += run_cli(common + " --jobs 1 --out '" + (dir / "a.json").string() + "' --csv '" +
                 (dir / "a.csv").string() + "'");
  err += run_cli(common + " --jobs 1 --out '" + (dir / "b.json").string() + "' --csv '" +
                 (dir / "b.csv").string() + "'");
  err += run_cli(common + " --jobs 4 --out '" + (dir / "c.json").string() + "' --csv '" +
                 (dir / "c.csv").string() + "'");
  if (!err.empty()) return {false, "CLI failed: " + err};
  const std::string a = slurp(dir / "a.json");
  const std::string ac = slurp(dir / "a.csv");
  const bool pass = !a.empty() && a == slurp(dir / "b.json") && a == slurp(dir / "c.json") &&
                    ac == slurp(dir / "b.csv") && ac == slurp(dir / "c.csv");
  fs::remove_all(dir);
  return {pass, fmt("3 runs (jobs 1, 1, 4): JSON %zu bytes, CSV %zu bytes, %s", a.size(),
                    ac.size(), pass ? "identical" : "DIFFER")};
}

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// 8. Degenerate inputs yield the specified errors and warnings.
Outcome degenerate_inputs() {
  std::vector<std::string> failed;
  int checks = 0;
  auto check = [&](const std::string& name, const std::function<bool()>& body) {
    ++checks;
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception& e) {
      failed.push_back(name + " (threw " + e.what() + ")");
      return;
    }
    if (!ok) failed.push_back(name);
  };
  io::RunConfig config;
  config.train_end = 2016;
  config.mc_draws = 200;
  config.mc_reps = 5;

  check("constant series: R estimate 0 with DegenerateVariance warning", [] {
    Warnings w;
    const std::vector<double> x(10, 2.0);
    return estimate_r(std::span<const double>(x), &w) == 0.0 && w.size() == 1 &&
           w[0].code == WarningCode::DegenerateVariance;
  });
  check("constant series: fit raises DegenerateVariance", [&] {
    const TimeSeries s("c", 1990, std::vector<Value>(20, Value(2.0)));
    return code_of([&] { fit_model(s, ModelSpec{}); }) == ErrorCode::DegenerateVariance;
  });
  check("constant series: scan reports a skipped series", [&] {
    const TimeSeries s("c", 1990, std::vector<Value>(30, Value(2.0)));
    const auto r = io::analyze_series(s, config);
    return r.skipped && r.skipped->rfind("DegenerateVariance", 0) == 0;
  });
  check("leading and interior missing: filter matches oracle", [] {
    const std::vector<Value> y{std::nullopt, 1.0, 2.5, std::nullopt, 2.0, 4.0, std::nullopt, 5.5};
    const std::vector<Value> tail(y.begin() + 1, y.end());
    return foscan::testing::worst_oracle_error(2, 0.3, 1.2, tail, 3, 2) < 1e-8;
  });
  check("leading and interior missing: scan trims and flags observed years only", [&] {
    std::mt19937_64 rng(8);
    const auto sim = foscan::testing::simulate_trend(2, 0.1, 1.0, 30, rng);
    auto v = foscan::testing::to_values(sim.observed);
    v[0] = v[1] = std::nullopt;
    v[10] = std::nullopt;
    v[28] = std::nullopt;
    const auto r = io::analyze_series(TimeSeries("m", 1990, v), config);
    if (r.skipped) return false;
    bool finite = std::isfinite(r.model->log_lik);
    for (const auto& f : r.flags) finite = finite && std::isfinite(f.z);
    return finite && r.model->run.first_epoch == 1992 && r.flags.size() == 2;
  });
  check("shorter than d+2: InsufficientData", [] {
    const TimeSeries s("s", 2000, {1.0, 2.0, 4.0});
    ModelSpec spec;
    return code_of([&] { fit_model(s, spec); }) == ErrorCode::InsufficientData;
  });
  check("shorter than d+2: scan skip reason", [&] {
    const auto r = io::analyze_series(TimeSeries("s", 2014, {1.0, 2.0, 4.0, 3.0, 5.0, 4.0}), config);
    return r.skipped && r.skipped->rfind("InsufficientData", 0) == 0;
  });
  check("all missing: InsufficientData", [] {
    const TimeSeries s("s", 2000, {std::nullopt, std::nullopt});
    return code_of([&] { initial_condition(s, ModelSpec{}, 1.0); }) ==
           ErrorCode::InsufficientData;
  });
  check("R=0, Q>0: gain 1 and filtered state equals data", [] {
    const std::vector<Value> y{1.0, 3.0, 2.0, 5.0};
    const InitialState init{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Identity(1, 1)};
    const auto run = kalman_filter(y, build_matrices(1), 0.5, 0.0, init);
    bool ok = true;
    for (std::size_t n = 0; n < y.size(); ++n) {
      ok = ok && run.steps[n].gain(0) == 1.0 && run.steps[n].filtered_state(0) == *y[n];
    }
    return ok;
  });
  check("R=0, Q=0: InvalidArgument", [] {
    const std::vector<Value> y{1.0, 2.0};
    const InitialState init{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
    return code_of([&] { kalman_filter(y, build_matrices(1), 0.0, 0.0, init); }) ==
           ErrorCode::InvalidArgument;
  });
  check("R=0 with zero prior variance: NumericalFailure", [] {
    const std::vector<Value> y{1.0, 2.0};
    const InitialState init{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1)};
    return code_of([&] { kalman_filter(y, build_matrices(1), 1.0, 0.0, init); }) ==
           ErrorCode::NumericalFailure;
  });
  check("Q=0 with zero prior: smoother warns SingularPredictedVariance", [] {
    const std::vector<Value> y{1.0, 2.0, 3.0, 2.5};
    const InitialState init{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
    const auto run = kalman_filter(y, build_matrices(2), 0.0, 1.0, init);
    const auto sm = fixed_interval_smoother(run);
    bool finite = true;
    for (const auto& m : sm.means) finite = finite && m.allFinite();
    return finite && !sm.warnings.empty() &&
           sm.warnings.front().code == WarningCode::SingularPredictedVariance;
  });
  check("zero predictive sd: DegenerateSd warning", [] {
    Warnings w;
    return pvalue_analytic(1.0, 0.0, 0.0, &w) == 0.0 && w.size() == 1 &&
           w[0].code == WarningCode::DegenerateSd;
  });
  check("order 3: UnsupportedOrder", [] {
    return code_of([] { build_matrices(3); }) == ErrorCode::UnsupportedOrder;
  });
  check("horizon/epoch mismatch: EpochMismatch", [] {
    ForecastDistribution fd{2016, {1.0, 2.0}, {1.0, 1.0}};
    return code_of([&] {
             classify_flags(TimeSeries("s", 2018, {1.0, 2.0}), fd, BandSpec::defaults(),
                            McSettings{});
           }) == ErrorCode::EpochMismatch;
  });

  std::string detail = fmt("%d/%d checks", checks - static_cast<int>(failed.size()), checks);
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"joint probability arithmetic", table_arithmetic},
      {"Monte-Carlo vs analytic p-values", mc_agreement},
      {"band coverage calibration", band_coverage},
      {"level shift flagged, baseline not", qualitative_findings},
      {"AMO grid search", amo_grid_search},
      {"scan determinism", determinism},
      {"degenerate inputs", degenerate_inputs},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria pass\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
