#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "foscan/core_types.hpp"
#include "foscan/io/config.hpp"

namespace foscan::io {

inline constexpr const char* kToolkitName = "foscan";
inline constexpr const char* kToolkitVersion = "0.1.0";

/// Report document: {"meta": {...}, "series": {name: {...}}}. Keys are
/// emitted in a fixed order.
Json report_to_json(const std::vector<FoReport>& reports, const RunConfig& config);
Json series_to_json(const FoReport& report);

/// Two-space indented JSON with every floating-point number written with 17
/// significant digits. Non-finite numbers become null.
std::string dump_json(const Json& j);

/// Throws IoError.
void write_report(const std::vector<FoReport>& reports, const RunConfig& config,
                  const std::filesystem::path& path);
Json read_report(const std::filesystem::path& path);

/// One row per (series, held-out year) plus one `joint` row per series.
std::string csv_summary(const std::vector<FoReport>& reports);
void write_csv_summary(const std::vector<FoReport>& reports,
                       const std::filesystem::path& path);

/// Fixed-width model table (series, d, q ratio, Q, R, log-likelihood, AIC).
std::string fit_table(const std::vector<FoReport>& reports);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace foscan::io
