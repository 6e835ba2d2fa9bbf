#include "foscan/io/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "foscan/io/report.hpp"

namespace foscan::io {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

// Light to dark: outermost band first.
constexpr const char* kBandFills[] = {"#cfe6f5", "#a6d1ee", "#7dbbe6", "#5aa5dc"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Point {
  double x;
  double y;
};

struct Scale {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return step * mag;
}

std::string polyline(const std::vector<Point>& pts, const Scale& s,
                     const std::string& attrs) {
  std::string out = "<polyline fill=\"none\" " + attrs + " points=\"";
  for (const auto& p : pts) out += fmt(s.px(p.x)) + "," + fmt(s.py(p.y)) + " ";
  out += "\"/>\n";
  return out;
}

std::optional<double> number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  return std::nullopt;
}

}  // namespace

std::string render_svg(const Json& series) {
  if (!series.is_object() || !series.contains("forecast") ||
      (series.contains("skipped") && !series.at("skipped").is_null())) {
    throw Error(ErrorCode::InvalidArgument, "cannot plot a skipped series");
  }
  const std::string name = series.value("name", std::string("series"));
  const std::string units = series.value("units", std::string());
  const int train_end = series.at("model").at("trainEnd").get<int>();

  // Training observations, split into runs at missing values.
  std::vector<std::vector<Point>> obs_runs(1);
  for (const auto& o : series.at("observations")) {
    const int year = o.at("year").get<int>();
    if (year > train_end) continue;
    if (auto v = number(o.at("value"))) {
      obs_runs.back().push_back({static_cast<double>(year), *v});
    } else if (!obs_runs.back().empty()) {
      obs_runs.emplace_back();
    }
  }
  std::vector<Point> trend;
  for (const auto& t : series.at("trend")) {
    trend.push_back({t.at("year").get<double>(), t.at("mean").get<double>()});
  }
  std::vector<Point> forecast_mean;
  if (!trend.empty()) forecast_mean.push_back(trend.back());
  std::vector<std::string> labels;
  struct BandRow {
    double year;
    std::vector<std::pair<double, double>> bounds;
  };
  std::vector<BandRow> bands;
  for (const auto& f : series.at("forecast")) {
    const double year = f.at("year").get<double>();
    forecast_mean.push_back({year, f.at("mean").get<double>()});
    BandRow row{year, {}};
    for (const auto& [label, lohi] : f.at("bands").items()) {
      if (bands.empty()) labels.push_back(label);
      row.bounds.emplace_back(lohi.at(0).get<double>(), lohi.at(1).get<double>());
    }
    bands.push_back(std::move(row));
  }
  std::vector<Point> held_out;
  for (const auto& f : series.at("flags")) {
    held_out.push_back({f.at("year").get<double>(), f.at("observed").get<double>()});
  }

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto extend = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& run : obs_runs) {
    for (const auto& p : run) extend(p.x, p.y);
  }
  for (const auto& p : trend) extend(p.x, p.y);
  for (const auto& p : forecast_mean) extend(p.x, p.y);
  for (const auto& p : held_out) extend(p.x, p.y);
  for (const auto& row : bands) {
    for (const auto& [lo, hi] : row.bounds) {
      extend(row.year, lo);
      extend(row.year, hi);
    }
  }
  if (!std::isfinite(xmin)) {
    throw Error(ErrorCode::InvalidArgument, "nothing to plot for '" + name + "'");
  }
  if (ymax - ymin < 1e-12) {
    const double pad = std::max(1.0, std::abs(ymax) * 0.1);
    ymin -= pad;
    ymax += pad;
  }
  const double ypad = 0.05 * (ymax - ymin);
  Scale s{xmin - 0.5, xmax + 0.5, ymin - ypad, ymax + ypad};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(name)
      << (units.empty() ? "" : " (" + escape(units) + ")") << "</text>\n";

  // Bands, widest first so narrower ones sit on top.
  for (std::size_t level = 0; level < labels.size(); ++level) {
    const char* fill = kBandFills[std::min<std::size_t>(level, std::size(kBandFills) - 1)];
    svg << "<g class=\"band\" data-level=\"" << escape(labels[level]) << "\" fill=\""
        << fill << "\" stroke=\"none\">\n";
    if (bands.size() == 1) {
      const auto& row = bands.front();
      const double x0 = s.px(row.year - 0.3);
      const double x1 = s.px(row.year + 0.3);
      const double top = s.py(row.bounds[level].second);
      const double bottom = s.py(row.bounds[level].first);
      svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(top) << "\" width=\""
          << fmt(x1 - x0) << "\" height=\"" << fmt(bottom - top) << "\"/>\n";
    } else {
      svg << "<polygon points=\"";
      for (const auto& row : bands) {
        svg << fmt(s.px(row.year)) << ',' << fmt(s.py(row.bounds[level].second)) << ' ';
      }
      for (auto it = bands.rbegin(); it != bands.rend(); ++it) {
        svg << fmt(s.px(it->year)) << ',' << fmt(s.py(it->bounds[level].first)) << ' ';
      }
      svg << "\"/>\n";
    }
    svg << "</g>\n";
  }

  // Axes.
  const double plot_right = kWidth - kRight;
  const double plot_bottom = kHeight - kBottom;
  svg << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << plot_bottom << "\" x2=\"" << plot_right
      << "\" y2=\"" << plot_bottom << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << plot_bottom << "\"/>\n</g>\n";
  svg << "<g class=\"ticks\" fill=\"#333\">\n";
  const double xstep = std::max(1.0, nice_step(xmax - xmin + 1.0, 8));
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax; x += xstep) {
    svg << "<text x=\"" << fmt(s.px(x)) << "\" y=\"" << plot_bottom + 18
        << "\" text-anchor=\"middle\">" << static_cast<long>(x) << "</text>\n";
  }
  const double ystep = nice_step(s.y1 - s.y0, 6);
  for (double y = std::ceil(s.y0 / ystep) * ystep; y <= s.y1; y += ystep) {
    char label[32];
    std::snprintf(label, sizeof label, "%g", std::abs(y) < ystep * 1e-9 ? 0.0 : y);
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(s.py(y) + 4)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << (kLeft + plot_right) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">year</text>\n"
      << "<text transform=\"translate(18," << (kTop + plot_bottom) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(units.empty() ? name : units) << "</text>\n";

  for (const auto& run : obs_runs) {
    if (run.size() >= 2) {
      svg << polyline(run, s, "class=\"observed\" stroke=\"#9a9a9a\" stroke-width=\"1.5\"");
    } else if (run.size() == 1) {
      svg << "<circle class=\"observed\" cx=\"" << fmt(s.px(run[0].x)) << "\" cy=\""
          << fmt(s.py(run[0].y)) << "\" r=\"2\" fill=\"#9a9a9a\"/>\n";
    }
  }
  svg << polyline(trend, s, "class=\"trend\" stroke=\"#1f5fbf\" stroke-width=\"2\"");
  svg << polyline(forecast_mean, s,
                  "class=\"forecast\" stroke=\"#1f5fbf\" stroke-width=\"2\" "
                  "stroke-dasharray=\"2,4\"");
  for (const auto& p : held_out) {
    svg << "<circle class=\"heldout\" cx=\"" << fmt(s.px(p.x)) << "\" cy=\""
        << fmt(s.py(p.y)) << "\" r=\"4\" fill=\"black\"/>\n";
  }

  // Legend.
  double ly = kTop + 10;
  const double lx = plot_right + 15;
  auto legend_text = [&](const std::string& text) {
    svg << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4 << "\">" << escape(text)
        << "</text>\n";
    ly += 20;
  };
  svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\""
      << ly << "\" stroke=\"#9a9a9a\" stroke-width=\"1.5\"/>\n";
  legend_text("observed");
  svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\""
      << ly << "\" stroke=\"#1f5fbf\" stroke-width=\"2\"/>\n";
  legend_text("smoothed trend");
  svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\""
      << ly << "\" stroke=\"#1f5fbf\" stroke-width=\"2\" stroke-dasharray=\"2,4\"/>\n";
  legend_text("forecast mean");
  svg << "<circle cx=\"" << lx + 11 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"black\"/>\n";
  legend_text("held-out");
  for (std::size_t level = 0; level < labels.size(); ++level) {
    const char* fill = kBandFills[std::min<std::size_t>(level, std::size(kBandFills) - 1)];
    svg << "<rect x=\"" << lx << "\" y=\"" << ly - 6 << "\" width=\"22\" height=\"12\" fill=\""
        << fill << "\"/>\n";
    legend_text(labels[level] + " band");
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_plot(const Json& series, const std::filesystem::path& path) {
  write_text_file(path, render_svg(series));
}

}  // namespace foscan::io
