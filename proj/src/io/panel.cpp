#include "foscan/io/panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string_view>

namespace foscan::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = unquote(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<Epoch> parse_year(std::string_view cell) {
  cell = unquote(cell);
  Epoch year = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), year);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return year;
}

}  // namespace

Panel parse_panel(std::istream& in, const ReadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;

  // Header, skipping blank lines and a UTF-8 byte order mark.
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorCode::EmptyPanel, "panel file is empty");

  const auto header = split_row(line);
  if (unquote(header.front()) != "year") {
    throw Error(ErrorCode::ParseError, "first header column must be 'year'");
  }
  std::set<std::string> seen_names;
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string name(unquote(header[c]));
    if (name.empty()) {
      throw Error(ErrorCode::ParseError,
                  "empty series name in header column " + std::to_string(c + 1));
    }
    if (!seen_names.insert(name).second) {
      throw Error(ErrorCode::ParseError, "duplicate series name '" + name + "'");
    }
    names.push_back(std::move(name));
  }
  if (names.empty()) throw Error(ErrorCode::EmptyPanel, "panel has no series columns");

  std::map<Epoch, std::vector<Value>> rows;
  std::vector<std::optional<std::string>> column_error(names.size());

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    const auto year = parse_year(cells[0]);
    if (!year) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": bad year '" +
                                             std::string(cells[0]) + "'");
    }
    std::vector<Value> values(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::string_view cell = cells[c + 1];
      if (cell.empty() || unquote(cell).empty()) continue;
      values[c] = parse_number(cell);
      if (!values[c]) {
        const std::string reason = "malformed cell '" + std::string(cell) +
                                   "' at year " + std::to_string(*year);
        if (options.strict) {
          throw Error(ErrorCode::ParseError,
                      "series '" + names[c] + "': " + reason);
        }
        if (!column_error[c]) column_error[c] = reason;
      }
    }
    if (!rows.emplace(*year, std::move(values)).second) {
      throw Error(ErrorCode::ParseError, "duplicate year " + std::to_string(*year));
    }
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyPanel, "panel has no data rows");

  const Epoch first = rows.begin()->first;
  const Epoch last = rows.rbegin()->first;
  Panel panel;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (column_error[c]) {
      panel.rejected.push_back({names[c], *column_error[c]});
      continue;
    }
    std::vector<Value> values(static_cast<std::size_t>(last - first) + 1);
    for (const auto& [year, row] : rows) {
      values[static_cast<std::size_t>(year - first)] = row[c];
    }
    panel.series.emplace_back(names[c], first, std::move(values));
  }
  return panel;
}

Panel read_panel(const std::filesystem::path& path, const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return parse_panel(in, options);
}

}  // namespace foscan::io
