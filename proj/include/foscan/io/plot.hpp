#pragma once

#include <filesystem>
#include <string>

#include "foscan/io/config.hpp"

namespace foscan::io {

/// SVG chart for one analyzed series, built from its report JSON object
/// (see series_to_json): training observations as a grey line, smoothed
/// trend, dotted predictive mean, nested forecast bands and the held-out
/// observations as black points.
///
/// Throws InvalidArgument for a skipped series.
std::string render_svg(const Json& series);

/// Throws IoError.
void write_plot(const Json& series, const std::filesystem::path& path);

}  // namespace foscan::io
