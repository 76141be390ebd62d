#pragma once

// Serialization helpers shared by the bench harness and the CLI: byte-stable
// number formatting, CSV/JSON result tables, interleaved complex arrays, and
// a small self-contained SVG line-plot emitter. Output is deterministic for
// a fixed (config, seed): no timestamps, locales, or pointer-order anywhere.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamopt/linalg.hpp"

namespace beamopt {

using json = nlohmann::json;

/// Configuration problems (bad file, unknown key/method, wrong type) map to
/// CLI exit code 2; numeric failures map to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest stable decimal form used in all CSV/SVG output.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

inline std::string fmt_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return std::string(buf);
}

// ---- complex arrays --------------------------------------------------------------

/// Interleaved (re, im) encoding of complex vectors/matrices (column-major).
inline json to_interleaved(const CVec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i).real());
    arr.push_back(v(i).imag());
  }
  return arr;
}

inline json to_interleaved(const CMat& m) {
  json arr = json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      arr.push_back(m(i, j).real());
      arr.push_back(m(i, j).imag());
    }
  return arr;
}

inline CVec vec_from_interleaved(const json& arr) {
  if (!arr.is_array() || arr.size() % 2 != 0)
    throw ConfigError("complex array must be interleaved (re, im) pairs");
  CVec v(arr.size() / 2);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = cd(arr.at(2 * i).get<double>(), arr.at(2 * i + 1).get<double>());
  return v;
}

inline CMat mat_from_interleaved(const json& arr, Eigen::Index rows, Eigen::Index cols) {
  const CVec flat = vec_from_interleaved(arr);
  if (flat.size() != rows * cols) throw ConfigError("complex matrix has wrong element count");
  CMat m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = flat(k++);
  return m;
}

// ---- result tables ----------------------------------------------------------------

struct ResultRow {
  double sweep_value = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

struct ResultTable {
  std::string sweep_variable;
  std::vector<ResultRow> rows;
  std::vector<std::vector<double>> raw;  // per-trial samples aligned with rows
};

/// Aggregate samples into (mean, std_error); std_error = sample std (n-1
/// denominator) / sqrt(n), defined as 0 for a single trial.
inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const int n = int(xs.size());
  if (n == 0) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1)) / std::sqrt(double(n))};
}

inline std::string table_to_csv(const ResultTable& t) {
  std::string out = "sweep_variable,sweep_value,method,metric,mean,std_error,trials\n";
  for (const auto& r : t.rows) {
    out += t.sweep_variable + "," + fmt_double(r.sweep_value) + "," + r.method + "," + r.metric +
           "," + fmt_double(r.mean) + "," + fmt_double(r.std_error) + "," +
           std::to_string(r.trials) + "\n";
  }
  return out;
}

inline json table_to_json(const ResultTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"sweep_value", r.sweep_value},
                    {"method", r.method},
                    {"metric", r.metric},
                    {"mean", r.mean},
                    {"std_error", r.std_error},
                    {"trials", r.trials}});
  return {{"sweep_variable", t.sweep_variable}, {"rows", rows}};
}

// ---- files ------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---- beampattern artifacts -----------------------------------------------------------

inline std::string beampattern_csv(const RVec& theta_deg, const RVec& power_linear) {
  std::string out = "theta_deg,power_db\n";
  for (Eigen::Index i = 0; i < theta_deg.size(); ++i) {
    const double db = 10.0 * std::log10(std::max(power_linear(i), 1e-300));
    out += fmt_double(theta_deg(i)) + "," + fmt_double(db) + "\n";
  }
  return out;
}

/// Minimal standalone SVG polyline plot; pure string assembly so re-rendering
/// the same series is byte-identical.
inline std::string svg_line_plot(const RVec& x, const RVec& y, const std::string& title,
                                 const std::string& x_label, const std::string& y_label) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("svg_line_plot: need matching series with >= 2 points");
  const int w = 720, h = 420;
  const int ml = 60, mr = 20, mt = 40, mb = 50;
  double xmin = x.minCoeff(), xmax = x.maxCoeff();
  double ymin = y.minCoeff(), ymax = y.maxCoeff();
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - (v - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
       "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
       std::to_string(h) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
  // Axes.
  s += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(h - mb) + "\" x2=\"" +
       std::to_string(w - mr) + "\" y2=\"" + std::to_string(h - mb) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) + "\" x2=\"" +
       std::to_string(ml) + "\" y2=\"" + std::to_string(h - mb) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // Tick labels at the extremes.
  s += "<text x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(h - mb + 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
       fmt_double(xmin, 6) + "</text>\n";
  s += "<text x=\"" + std::to_string(w - mr) + "\" y=\"" + std::to_string(h - mb + 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
       fmt_double(xmax, 6) + "</text>\n";
  s += "<text x=\"" + std::to_string(ml - 6) + "\" y=\"" + std::to_string(h - mb) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
       fmt_double(ymin, 6) + "</text>\n";
  s += "<text x=\"" + std::to_string(ml - 6) + "\" y=\"" + std::to_string(mt + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
       fmt_double(ymax, 6) + "</text>\n";
  // Axis labels.
  s += "<text x=\"" + std::to_string((ml + w - mr) / 2) + "\" y=\"" + std::to_string(h - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + std::to_string((mt + h - mb) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 16 " + std::to_string((mt + h - mb) / 2) + ")\">" + y_label +
       "</text>\n";
  // Data.
  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += " ";
    s += fmt_double(px(x(i)), 8) + "," + fmt_double(py(y(i)), 8);
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace beamopt
