#include "foscan/io/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace foscan::io {
namespace {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json value_or_null(const Value& v) { return v ? Json(*v) : Json(nullptr); }

void dump_to(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        dump_to(out, value, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        dump_to(out, value, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : ""; }

}  // namespace

Json series_to_json(const FoReport& report) {
  Json s;
  s["name"] = report.name;
  s["units"] = report.units;
  s["skipped"] = report.skipped ? Json(*report.skipped) : Json(nullptr);

  Json observations = Json::array();
  for (std::size_t i = 0; i < report.observations.size(); ++i) {
    observations.push_back({{"year", report.observations.epoch(i)},
                            {"value", value_or_null(report.observations[i])}});
  }

  if (report.skipped || !report.model) {
    s["observations"] = std::move(observations);
    return s;
  }

  const FittedModel& m = *report.model;
  s["model"] = {{"d", m.spec.order},
                {"qRatio", m.q_ratio},
                {"Q", m.q_star},
                {"R", m.r},
                {"logLik", m.log_lik},
                {"aic", m.aic},
                {"nEffective", m.n_effective},
                {"trainStart", m.run.first_epoch},
                {"trainEnd", m.run.last_epoch()},
                {"initMode", std::string(to_string(m.spec.init_mode))},
                {"burnIn", m.spec.burn_in()}};

  Json trend = Json::array();
  for (const auto& p : m.smoothed_trend()) {
    trend.push_back({{"year", p.epoch}, {"mean", p.mean}, {"var", p.var}});
  }
  s["trend"] = std::move(trend);
  s["observations"] = std::move(observations);

  Json forecast = Json::array();
  for (const auto& hb : report.bands) {
    Json bands = Json::object();
    for (const auto& b : hb.bands) bands[b.label] = Json::array({b.lower, b.upper});
    forecast.push_back(
        {{"year", hb.epoch}, {"mean", hb.mean}, {"sd", hb.sd}, {"bands", bands}});
  }
  s["forecast"] = std::move(forecast);

  Json flags = Json::array();
  for (const auto& f : report.flags) {
    flags.push_back({{"year", f.epoch},
                     {"observed", f.observed},
                     {"z", number_or_null(f.z)},
                     {"side", std::string(to_string(f.side))},
                     {"outside", f.outside_levels},
                     {"pAnalytic", f.p_analytic},
                     {"pMc", f.p_mc}});
  }
  s["flags"] = std::move(flags);

  const TendencyResult& t = report.tendency;
  s["tendency"] = {{"years", t.epochs},
                   {"perYearP", t.per_year_p},
                   {"joint", t.joint_probability},
                   {"jointStdError", t.joint_std_error},
                   {"analyticJoint", t.analytic_joint},
                   {"sameSide", t.same_side},
                   {"draws", t.mc_draws},
                   {"reps", t.mc_reps},
                   {"seed", t.seed}};

  Json anomalies = Json::array();
  for (const auto& a : report.anomalies) {
    anomalies.push_back({{"year", a.epoch}, {"value", value_or_null(a.value)}});
  }
  s["anomalies"] = std::move(anomalies);

  Json warnings = Json::array();
  for (const auto& w : report.warnings) {
    warnings.push_back({{"code", std::string(to_string(w.code))}, {"message", w.message}});
  }
  s["warnings"] = std::move(warnings);
  return s;
}

Json report_to_json(const std::vector<FoReport>& reports, const RunConfig& config) {
  Json doc;
  doc["meta"] = {{"toolkit", kToolkitName},
                 {"version", kToolkitVersion},
                 {"config", analysis_settings_json(config)}};
  Json series = Json::object();
  for (const auto& r : reports) series[r.name] = series_to_json(r);
  doc["series"] = std::move(series);
  return doc;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_to(out, j, 0);
  out += "\n";
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

void write_report(const std::vector<FoReport>& reports, const RunConfig& config,
                  const std::filesystem::path& path) {
  write_text_file(path, dump_json(report_to_json(reports, config)));
}

Json read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open report '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                "report '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string csv_summary(const std::vector<FoReport>& reports) {
  std::ostringstream out;
  out << "series,year,observed,predicted,sd,z,side,outermost_level,p_analytic,p_mc\n";
  for (const auto& r : reports) {
    if (r.skipped || !r.model) continue;
    const std::string name = csv_field(r.name);
    for (const auto& f : r.flags) {
      out << name << ',' << f.epoch << ',' << csv_number(f.observed) << ','
          << csv_number(f.mean) << ',' << csv_number(f.sd) << ',' << csv_number(f.z)
          << ',' << to_string(f.side) << ','
          << csv_field(f.outside_levels.empty() ? "none" : f.outside_levels.front())
          << ',' << csv_number(f.p_analytic) << ',' << csv_number(f.p_mc) << '\n';
    }
    out << name << ",joint,,,,,,," << csv_number(r.tendency.analytic_joint) << ','
        << csv_number(r.tendency.joint_probability) << '\n';
  }
  return out.str();
}

void write_csv_summary(const std::vector<FoReport>& reports,
                       const std::filesystem::path& path) {
  write_text_file(path, csv_summary(reports));
}

std::string fit_table(const std::vector<FoReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %2s %7s %12s %12s %12s %12s\n", "series",
                "d", "qRatio", "Q", "R", "logLik", "AIC");
  out << line;
  for (const auto& r : reports) {
    if (r.skipped || !r.model) {
      out << r.name << "  skipped: " << r.skipped.value_or("not fitted") << '\n';
      continue;
    }
    const FittedModel& m = *r.model;
    std::snprintf(line, sizeof line, "%-12s %2d %7.2f %12.6g %12.6g %12.4f %12.4f\n",
                  r.name.c_str(), m.spec.order, m.q_ratio, m.q_star, m.r, m.log_lik,
                  m.aic);
    out << line;
  }
  return out.str();
}

}  // namespace foscan::io
