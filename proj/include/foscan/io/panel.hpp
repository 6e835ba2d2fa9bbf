#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "foscan/core_types.hpp"

namespace foscan::io {

struct ReadOptions {
  /// Strict mode turns a malformed cell into a ParseError for the whole
  /// file. Otherwise the offending column is rejected and the rest of the
  /// panel is kept.
  bool strict = false;
};

struct RejectedColumn {
  std::string name;
  std::string reason;
};

struct Panel {
  std::vector<TimeSeries> series;
  std::vector<RejectedColumn> rejected;
};

/// Wide CSV: header `year,<name>,...`, one row per year, empty cell = missing.
/// Rows may come in any order. Every series is normalized to consecutive
/// years spanning the whole panel.
///
/// Throws ParseError for structural problems (bad header, bad or duplicate
/// year, duplicate series name, ragged rows) and EmptyPanel when no data
/// rows or columns exist.
Panel parse_panel(std::istream& in, const ReadOptions& options = {});

/// Throws IoError if the file cannot be opened.
Panel read_panel(const std::filesystem::path& path, const ReadOptions& options = {});

}  // namespace foscan::io
