// foscan: trend fitting, forecast bands and flagged-observation scans over
// panels of annual time series.
//
//   foscan fit panel.csv --train-end 2016
//   foscan scan panel.csv --train-end 2016 --horizon 3 --out report.json --csv flags.csv
//   foscan plot report.json --out-dir plots/
//   foscan anomaly panel.csv --from 1980 --to 2020

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foscan/fo_analysis.hpp"
#include "foscan/io/config.hpp"
#include "foscan/io/panel.hpp"
#include "foscan/io/pipeline.hpp"
#include "foscan/io/plot.hpp"
#include "foscan/io/report.hpp"

namespace fs = std::filesystem;
using namespace foscan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct ModelFlags {
  std::optional<int> train_end;
  std::optional<int> order;
  std::optional<double> q_min, q_max, q_step;
  std::optional<std::string> init;
  std::optional<int> burn_in;
  std::optional<double> r_override;
  std::vector<std::string> series;
  std::optional<int> jobs;
  bool strict = false;
};

struct ScanFlags {
  std::optional<int> horizon;
  std::optional<std::string> bands;
  std::optional<int> draws, reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, csv, plots;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--train-end", f.train_end, "Last year used for fitting");
  cmd->add_option("--order", f.order, "Difference order d (1 or 2)");
  cmd->add_option("--q-min", f.q_min, "Smallest system-noise ratio Q/R on the grid");
  cmd->add_option("--q-max", f.q_max, "Largest system-noise ratio Q/R on the grid");
  cmd->add_option("--q-step", f.q_step, "Grid step for Q/R");
  cmd->add_option("--init", f.init, "Initial state: diffuse or zero");
  cmd->add_option("--burn-in", f.burn_in,
                  "Leading innovations excluded from the likelihood (default d)");
  cmd->add_option("--r-override", f.r_override,
                  "Fix the observation variance instead of estimating it");
  cmd->add_option("--series", f.series, "Analyze only these columns")->delimiter(',');
  cmd->add_option("--jobs", f.jobs, "Worker threads");
  cmd->add_flag("--strict", f.strict, "Reject the whole file on a malformed cell");
}

io::RunConfig base_config(const std::optional<std::string>& config_path) {
  std::optional<fs::path> path;
  if (config_path) {
    path = *config_path;
  } else if (const char* env = std::getenv(io::kConfigEnvVar); env && *env) {
    path = env;
  }
  return path ? io::load_config(*path) : io::RunConfig{};
}

void apply_model_flags(io::RunConfig& c, const ModelFlags& f) {
  if (f.train_end) c.train_end = *f.train_end;
  if (f.order) c.order = *f.order;
  if (f.q_min) c.q_grid.min = *f.q_min;
  if (f.q_max) c.q_grid.max = *f.q_max;
  if (f.q_step) c.q_grid.step = *f.q_step;
  if (f.init) c.init_mode = parse_init_mode(*f.init);
  if (f.burn_in) c.burn_in = *f.burn_in;
  if (f.r_override) c.r_override = *f.r_override;
  if (!f.series.empty()) c.series = f.series;
  if (f.jobs) c.jobs = *f.jobs;
}

void apply_scan_flags(io::RunConfig& c, const ScanFlags& f) {
  if (f.horizon) c.horizon = *f.horizon;
  if (f.bands) c.bands = io::parse_bands(*f.bands);
  if (f.draws) c.mc_draws = *f.draws;
  if (f.reps) c.mc_reps = *f.reps;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output.report = *f.out;
  if (f.csv) c.output.csv = *f.csv;
  if (f.plots) c.output.plots = *f.plots;
}

void report_skips(const std::vector<FoReport>& reports) {
  for (const auto& r : reports) {
    if (r.skipped) std::cerr << "skipped " << r.name << ": " << *r.skipped << '\n';
  }
}

std::string plot_file_name(const std::string& series) {
  std::string out;
  for (char c : series) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  }
  return out + ".svg";
}

int write_plots(const io::Json& report, const fs::path& dir,
                const std::vector<std::string>& only) {
  int written = 0;
  for (const auto& [name, series] : report.at("series").items()) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    if (!series.at("skipped").is_null()) continue;
    io::write_plot(series, dir / plot_file_name(name));
    ++written;
  }
  return written;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trend fitting and flagged-observation analysis for annual time series"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::string> config_path;
  app.add_option("--config", config_path,
                 std::string("JSON config file (default: $") + io::kConfigEnvVar + ")");

  std::string input;
  ModelFlags model_flags;
  ScanFlags scan_flags;

  auto* fit = app.add_subcommand("fit", "Fit the trend model and print the model table");
  fit->add_option("panel", input, "Wide CSV panel (year first)")->required();
  add_model_flags(fit, model_flags);

  auto* scan = app.add_subcommand("scan", "Full pipeline: fit, forecast, flag, report");
  scan->add_option("panel", input, "Wide CSV panel (year first)")->required();
  add_model_flags(scan, model_flags);
  scan->add_option("--horizon", scan_flags.horizon, "Years ahead to forecast (J)");
  scan->add_option("--bands", scan_flags.bands,
                   "Band levels, e.g. \"95%:1.96,80%:1.28,~70%:1\"");
  scan->add_option("--draws", scan_flags.draws, "Monte-Carlo draws per p-value");
  scan->add_option("--reps", scan_flags.reps, "Monte-Carlo replicates");
  scan->add_option("--seed", scan_flags.seed, "Master random seed");
  scan->add_option("--out", scan_flags.out, "JSON report path");
  scan->add_option("--csv", scan_flags.csv, "CSV summary path");
  scan->add_option("--plots", scan_flags.plots, "Directory for SVG plots");

  std::string report_path;
  std::string plot_dir = ".";
  std::vector<std::string> plot_series;
  auto* plot = app.add_subcommand("plot", "Render SVG plots from a JSON report");
  plot->add_option("report", report_path, "JSON report written by scan")->required();
  plot->add_option("--out-dir", plot_dir, "Output directory");
  plot->add_option("--series", plot_series, "Plot only these series")->delimiter(',');

  std::optional<int> window_from, window_to;
  std::optional<std::string> anomaly_out;
  auto* anomaly = app.add_subcommand("anomaly", "Deviations from the window mean");
  anomaly->add_option("panel", input, "Wide CSV panel (year first)")->required();
  anomaly->add_option("--from", window_from, "First year of the averaging window");
  anomaly->add_option("--to", window_to, "Last year of the averaging window");
  anomaly->add_option("--out", anomaly_out, "Write CSV here instead of stdout");
  anomaly->add_option("--series", model_flags.series, "Only these columns")->delimiter(',');
  anomaly->add_flag("--strict", model_flags.strict, "Reject the whole file on a malformed cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*plot) {
      const io::Json report = io::read_report(report_path);
      const int n = write_plots(report, plot_dir, plot_series);
      std::cerr << "wrote " << n << " plot(s) to " << plot_dir << '\n';
      return kExitOk;
    }

    io::RunConfig config = base_config(config_path);
    apply_model_flags(config, model_flags);
    if (*scan) apply_scan_flags(config, scan_flags);
    config.validate();

    const io::Panel panel = io::read_panel(input, {.strict = model_flags.strict});

    if (*fit) {
      const auto reports = io::run_fit(panel, config);
      std::cout << io::fit_table(reports);
      report_skips(reports);
      return kExitOk;
    }

    if (*scan) {
      const auto reports = io::run_scan(panel, config);
      const io::Json doc = io::report_to_json(reports, config);
      if (config.output.report) {
        io::write_text_file(*config.output.report, io::dump_json(doc));
      } else if (!config.output.csv) {
        std::cout << io::dump_json(doc);
      }
      if (config.output.csv) io::write_csv_summary(reports, *config.output.csv);
      if (config.output.plots) {
        fs::create_directories(*config.output.plots);
        write_plots(doc, *config.output.plots, {});
      }
      report_skips(reports);
      return kExitOk;
    }

    if (*anomaly) {
      std::string out = "series,year,anomaly\n";
      for (const auto& series : panel.series) {
        if (!config.selects(series.name())) continue;
        const TimeSeries observed = series.trimmed();
        if (observed.empty()) continue;
        std::vector<AnomalyPoint> points;
        try {
          points = anomalies(observed, window_from.value_or(observed.first_epoch()),
                             window_to.value_or(observed.last_epoch()));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::EmptyWindow) throw;
          std::cerr << "skipped " << series.name() << ": " << e.what() << '\n';
          continue;
        }
        for (const auto& p : points) {
          char value[40];
          char* end = value;
          if (p.value) end = std::to_chars(value, value + sizeof value, *p.value).ptr;
          out += series.name() + "," + std::to_string(p.epoch) + "," + std::string(value, end) + "\n";
        }
      }
      for (const auto& r : panel.rejected) {
        std::cerr << "skipped " << r.name << ": " << r.reason << '\n';
      }
      if (anomaly_out) {
        io::write_text_file(*anomaly_out, out);
      } else {
        std::cout << out;
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "foscan: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? kExitIo : kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "foscan: IoError: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
