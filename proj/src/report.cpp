#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tame/bench.hpp"

namespace tame::bench {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["n_half"] = c.n_half;
  j["a"] = c.a;
  j["m"] = c.m;
  j["omega0"] = c.omega0;
  j["eta_list"] = c.eta_list;
  j["variant"] = c.variant;
  j["windows"] = c.windows;
  j["n_standard"] = c.n_standard;
  j["n_arbitrate"] = c.n_arbitrate;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["verdict_rule"] = c.verdict_rule;
  j["t_a_periods"] = c.t_a_periods;
  j["t_samp_frac"] = c.t_samp_frac;
  j["max_doublings"] = c.max_doublings;
  j["ta_rel_tol"] = c.ta_rel_tol;
  j["ansatz_depth"] = c.ansatz_depth;
  j["max_sweeps"] = c.max_sweeps;
  j["max_edge_states"] = c.max_edge_states;
  j["harvest_cap"] = c.harvest_cap;
  j["anneal_steps"] = c.anneal_steps;
  j["anneal_taus"] = c.anneal_taus;
  j["anneal_levels"] = c.anneal_levels;
  j["anneal_level_margin"] = c.anneal_level_margin;
  j["n_fft"] = c.n_fft;
  j["fft_threshold"] = c.fft_threshold;
  j["fft_min_periods"] = c.fft_min_periods;
  j["measure_walltime"] = c.measure_walltime;
  return j;
}

}  // namespace

void emit_csv(const BenchmarkReport& report, const std::string& path) {
  std::string out =
      "variant,window,eta,standard_mean,standard_ci_low,standard_ci_high,"
      "diagnostic_mean,diagnostic_ci_low,diagnostic_ci_high,verdict,"
      "n_accepted_standard,n_accepted_arbitrate,wall_seconds\n";
  for (const ReportRow& row : report.rows) {
    out += std::to_string(row.variant);
    out += ',';
    out += row.window;
    out += ',';
    out += fmt(row.eta);
    out += ',';
    if (row.standard_ok) {
      out += fmt(row.standard_mean);
      out += ',';
      out += fmt(row.standard_ci_low);
      out += ',';
      out += fmt(row.standard_ci_high);
    } else {
      out += ",,";
    }
    out += ',';
    if (row.diagnostic_ok) {
      out += fmt(row.diagnostic_mean);
      out += ',';
      out += fmt(row.diagnostic_ci_low);
      out += ',';
      out += fmt(row.diagnostic_ci_high);
    } else {
      out += ",,";
    }
    out += ',';
    out += row.verdict;
    out += ',';
    out += std::to_string(row.n_accepted_standard);
    out += ',';
    out += std::to_string(row.n_accepted_arbitrate);
    out += ',';
    out += fmt(row.wall_seconds);
    out += '\n';
  }
  write_file(path, out);
}

void emit_json(const BenchmarkReport& report, const std::string& path) {
  ordered_json j;
  j["schema_version"] = report.config.schema_version;
  j["config"] = config_to_json(report.config);
  j["spectrum"] = {{"e_min", report.e_min},
                   {"e_max", report.e_max},
                   {"delta_b", report.delta_b}};
  ordered_json rows = ordered_json::array();
  for (const ReportRow& row : report.rows) {
    ordered_json r;
    r["variant"] = row.variant;
    r["window"] = row.window;
    r["eta"] = row.eta;
    r["standard_ok"] = row.standard_ok;
    r["standard_mean"] = row.standard_mean;
    r["standard_ci_low"] = row.standard_ci_low;
    r["standard_ci_high"] = row.standard_ci_high;
    r["diagnostic_ok"] = row.diagnostic_ok;
    r["diagnostic_mean"] = row.diagnostic_mean;
    r["diagnostic_ci_low"] = row.diagnostic_ci_low;
    r["diagnostic_ci_high"] = row.diagnostic_ci_high;
    r["verdict"] = row.verdict;
    r["n_accepted_standard"] = row.n_accepted_standard;
    r["n_accepted_arbitrate"] = row.n_accepted_arbitrate;
    r["wall_seconds"] = row.wall_seconds;
    r["n_proposals_standard"] = row.n_proposals_standard;
    r["n_draws_arbitrate"] = row.n_draws_arbitrate;
    r["time_averages_converged"] = row.time_averages_converged;
    r["error"] = row.error;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  write_file(path, j.dump(2) + "\n");
}

namespace {

struct ChartPoint {
  double eta = 0.0;
  const ReportRow* row = nullptr;
};

std::string build_chart(const BenchmarkReport& report, int variant,
                        const std::string& window) {
  std::vector<ChartPoint> points;
  for (const ReportRow& row : report.rows) {
    if (row.variant == variant && row.window == window) {
      points.push_back({row.eta, &row});
    }
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const ChartPoint& u, const ChartPoint& v) { return u.eta < v.eta; });

  const double x0 = 70.0, x1 = 610.0, y_top = 46.0, y_bot = 356.0;
  double eta_lo = std::numeric_limits<double>::infinity();
  double eta_hi = -eta_lo;
  double v_lo = eta_lo, v_hi = -eta_lo;
  bool any_standard = false;
  for (const ChartPoint& p : points) {
    eta_lo = std::min(eta_lo, p.eta);
    eta_hi = std::max(eta_hi, p.eta);
    if (p.row->standard_ok) {
      any_standard = true;
      v_lo = std::min(v_lo, p.row->standard_ci_low);
      v_hi = std::max(v_hi, p.row->standard_ci_high);
    }
    if (p.row->diagnostic_ok) {
      v_lo = std::min(v_lo, p.row->diagnostic_ci_low);
      v_hi = std::max(v_hi, p.row->diagnostic_ci_high);
    }
  }
  if (eta_lo > eta_hi) {
    eta_lo = 0.0;
    eta_hi = 1.0;
  }
  if (eta_lo == eta_hi) {
    eta_lo -= 0.5;
    eta_hi += 0.5;
  }
  const bool have_values = v_lo <= v_hi;
  if (!have_values) {
    v_lo = 0.0;
    v_hi = 1.0;
  } else if (v_lo == v_hi) {
    v_lo -= 0.5;
    v_hi += 0.5;
  } else {
    const double pad = 0.1 * (v_hi - v_lo);
    v_lo -= pad;
    v_hi += pad;
  }

  const auto px = [&](double eta) {
    return x0 + (eta - eta_lo) / (eta_hi - eta_lo) * (x1 - x0);
  };
  const auto py = [&](double v) {
    return y_bot - (v - v_lo) / (v_hi - v_lo) * (y_bot - y_top);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "viewBox=\"0 0 640 420\">\n";
  svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  svg += "<text x=\"70\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">Variant " +
         std::to_string(variant) + ", " + window +
         " window: standard vs diagnostic</text>\n";

  for (int k = 0; k < 5; ++k) {
    const double eta = eta_lo + k * (eta_hi - eta_lo) / 4.0;
    const double v = v_lo + k * (v_hi - v_lo) / 4.0;
    svg += "<line x1=\"" + fmt6(px(eta)) + "\" y1=\"" + fmt6(y_bot) + "\" x2=\"" +
           fmt6(px(eta)) + "\" y2=\"" + fmt6(y_bot + 5.0) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt6(px(eta)) + "\" y=\"" + fmt6(y_bot + 18.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
           fmt6(eta) + "</text>\n";
    svg += "<line x1=\"" + fmt6(x0 - 5.0) + "\" y1=\"" + fmt6(py(v)) + "\" x2=\"" +
           fmt6(x0) + "\" y2=\"" + fmt6(py(v)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt6(x0 - 8.0) + "\" y=\"" + fmt6(py(v) + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + fmt6(v) +
           "</text>\n";
  }
  svg += "<line x1=\"" + fmt6(x0) + "\" y1=\"" + fmt6(y_top) + "\" x2=\"" + fmt6(x0) +
         "\" y2=\"" + fmt6(y_bot) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt6(x0) + "\" y1=\"" + fmt6(y_bot) + "\" x2=\"" + fmt6(x1) +
         "\" y2=\"" + fmt6(y_bot) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"340\" y=\"400\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">corruption eta</text>\n";
  svg += "<text x=\"18\" y=\"200\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 200)\">benchmark "
         "observable</text>\n";

  if (any_standard) {
    const ReportRow* base = nullptr;
    for (const ChartPoint& p : points) {
      if (p.row->standard_ok) {
        base = p.row;
        break;
      }
    }
    svg += "<rect x=\"" + fmt6(x0) + "\" y=\"" + fmt6(py(base->standard_ci_high)) +
           "\" width=\"" + fmt6(x1 - x0) + "\" height=\"" +
           fmt6(py(base->standard_ci_low) - py(base->standard_ci_high)) +
           "\" fill=\"#1f77b4\" fill-opacity=\"0.15\"/>\n";
    svg += "<line x1=\"" + fmt6(x0) + "\" y1=\"" + fmt6(py(base->standard_mean)) +
           "\" x2=\"" + fmt6(x1) + "\" y2=\"" + fmt6(py(base->standard_mean)) +
           "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }

  std::string band_fwd, band_rev, mean_line;
  for (const ChartPoint& p : points) {
    if (!p.row->diagnostic_ok) continue;
    const std::string x = fmt6(px(p.eta));
    band_fwd += x + "," + fmt6(py(p.row->diagnostic_ci_high)) + " ";
    band_rev = x + "," + fmt6(py(p.row->diagnostic_ci_low)) + " " + band_rev;
    mean_line += x + "," + fmt6(py(p.row->diagnostic_mean)) + " ";
  }
  if (!mean_line.empty()) {
    svg += "<polygon points=\"" + band_fwd + band_rev +
           "\" fill=\"#d62728\" fill-opacity=\"0.15\"/>\n";
    svg += "<polyline points=\"" + mean_line +
           "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  }
  for (const ChartPoint& p : points) {
    if (!p.row->diagnostic_ok) continue;
    const char* color = p.row->verdict == "positive"   ? "#2ca02c"
                        : p.row->verdict == "negative" ? "#d62728"
                                                       : "#7f7f7f";
    svg += "<circle cx=\"" + fmt6(px(p.eta)) + "\" cy=\"" +
           fmt6(py(p.row->diagnostic_mean)) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
  }

  svg += "<rect x=\"460\" y=\"54\" width=\"14\" height=\"14\" fill=\"#1f77b4\"/>\n";
  svg += "<text x=\"480\" y=\"66\" font-family=\"sans-serif\" font-size=\"12\">standard "
         "(classical)</text>\n";
  svg += "<rect x=\"460\" y=\"74\" width=\"14\" height=\"14\" fill=\"#d62728\"/>\n";
  svg += "<text x=\"480\" y=\"86\" font-family=\"sans-serif\" font-size=\"12\">diagnostic "
         "(simulated)</text>\n";
  if (points.empty()) {
    svg += "<text x=\"340\" y=\"200\" font-family=\"sans-serif\" font-size=\"14\" "
           "text-anchor=\"middle\">no rows for this chart</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

void emit_svg(const BenchmarkReport& report, const std::string& dir) {
  std::vector<std::pair<int, std::string>> charts;
  for (const ReportRow& row : report.rows) {
    const std::pair<int, std::string> key{row.variant, row.window};
    if (std::find(charts.begin(), charts.end(), key) == charts.end()) {
      charts.push_back(key);
    }
  }
  for (const auto& [variant, window] : charts) {
    const std::string path =
        dir + "/report_v" + std::to_string(variant) + "_" + window + ".svg";
    write_file(path, build_chart(report, variant, window));
  }
}

std::string emit_all(const BenchmarkReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const std::string csv_path = dir + "/report.csv";
  emit_csv(report, csv_path);
  emit_json(report, dir + "/report.json");
  emit_svg(report, dir);
  return csv_path;
}

BenchmarkReport report_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read report file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report file is not valid JSON: " + std::string(e.what()));
  }
  try {
    BenchmarkReport report;
    report.config = parse_config(j.at("config").dump(), RunConfig{});
    report.e_min = j.at("spectrum").at("e_min").get<double>();
    report.e_max = j.at("spectrum").at("e_max").get<double>();
    report.delta_b = j.at("spectrum").at("delta_b").get<double>();
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.variant = r.at("variant").get<int>();
      row.window = r.at("window").get<std::string>();
      row.eta = r.at("eta").get<double>();
      row.standard_ok = r.at("standard_ok").get<bool>();
      row.standard_mean = r.at("standard_mean").get<double>();
      row.standard_ci_low = r.at("standard_ci_low").get<double>();
      row.standard_ci_high = r.at("standard_ci_high").get<double>();
      row.diagnostic_ok = r.at("diagnostic_ok").get<bool>();
      row.diagnostic_mean = r.at("diagnostic_mean").get<double>();
      row.diagnostic_ci_low = r.at("diagnostic_ci_low").get<double>();
      row.diagnostic_ci_high = r.at("diagnostic_ci_high").get<double>();
      row.verdict = r.at("verdict").get<std::string>();
      row.n_accepted_standard = r.at("n_accepted_standard").get<long>();
      row.n_accepted_arbitrate = r.at("n_accepted_arbitrate").get<long>();
      row.wall_seconds = r.at("wall_seconds").get<double>();
      row.n_proposals_standard = r.at("n_proposals_standard").get<long>();
      row.n_draws_arbitrate = r.at("n_draws_arbitrate").get<long>();
      row.time_averages_converged = r.at("time_averages_converged").get<bool>();
      row.error = r.at("error").get<std::string>();
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report file is missing required fields: " + std::string(e.what()));
  }
}

}  // namespace tame::bench
