#pragma once

// Monte-Carlo bench harness: JSON experiment configs, the per-trial seed
// contract, method registries for the adaptive and hybrid families, optional
// BEAMOPT_THREADS trial-level parallelism (results are independent of the
// thread count), and the deterministic experiment runners behind every CLI
// subcommand. Wall-clock summaries go to stderr only so that output files are
// byte-stable for a fixed (config, seed).

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "beamopt/adaptive.hpp"
#include "beamopt/hybrid.hpp"
#include "beamopt/io.hpp"
#include "beamopt/irs.hpp"
#include "beamopt/model.hpp"
#include "beamopt/multicast.hpp"
#include "beamopt/rng.hpp"

namespace beamopt {

// ---- threading -----------------------------------------------------------------------

/// BEAMOPT_THREADS: unset/1 = serial, k > 1 = k workers, 0 = hardware count.
inline int bench_thread_count() {
  const char* env = std::getenv("BEAMOPT_THREADS");
  if (!env || !*env) return 1;
  int v = std::atoi(env);
  if (v == 0) v = int(std::thread::hardware_concurrency());
  return std::max(1, v);
}

/// Run fn(0..n-1) across the bench worker pool. Each index owns its output
/// slot and its derived seed, so scheduling order cannot affect results. The
/// first thrown exception is rethrown after all workers join.
template <typename Fn>
inline void parallel_trials(int n, Fn&& fn) {
  const int nt = std::min(bench_thread_count(), std::max(n, 1));
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mtx;
  std::exception_ptr first_err;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mtx);
        if (!first_err) first_err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_err) std::rethrow_exception(first_err);
}

/// Scoped wall-clock report to stderr (never to output files).
class RuntimeLog {
 public:
  explicit RuntimeLog(std::string label)
      : label_(std::move(label)), t0_(std::chrono::steady_clock::now()) {}
  ~RuntimeLog() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    std::fprintf(stderr, "[runtime] %s: %.3f s\n", label_.c_str(), s);
  }
  RuntimeLog(const RuntimeLog&) = delete;
  RuntimeLog& operator=(const RuntimeLog&) = delete;

 private:
  std::string label_;
  std::chrono::steady_clock::time_point t0_;
};

// ---- config plumbing ------------------------------------------------------------------

inline void expect_object(const json& j, const std::string& section) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
}

inline void expect_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& section) {
  expect_object(j, section);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in config section '" + section + "'");
}

/// Reject typos at the top level while letting one file configure several
/// subcommands.
inline void validate_root(const json& root) {
  static const std::set<std::string> sections = {
      "geometry",  "scenario", "methods", "sweep", "trials", "seed",
      "beampattern", "hybrid", "multicast", "irs", "jrc", "squint", "dataset"};
  expect_keys(root, sections, "(top level)");
}

inline ArrayGeometry geometry_from_json(const json& root) {
  ArrayGeometry g;
  g.n_elements = 10;  // bench default: a 10-element half-wavelength ULA
  if (!root.contains("geometry")) return g;
  const json& j = root.at("geometry");
  expect_keys(j, {"n_elements", "spacing_wavelengths", "carrier_freq_hz"}, "geometry");
  g.n_elements = j.value("n_elements", g.n_elements);
  g.spacing_wavelengths = j.value("spacing_wavelengths", g.spacing_wavelengths);
  g.carrier_freq_hz = j.value("carrier_freq_hz", g.carrier_freq_hz);
  if (g.n_elements < 1) throw ConfigError("geometry.n_elements must be >= 1");
  if (!(g.spacing_wavelengths > 0.0)) throw ConfigError("geometry.spacing_wavelengths must be > 0");
  if (!(g.carrier_freq_hz > 0.0)) throw ConfigError("geometry.carrier_freq_hz must be > 0");
  return g;
}

/// Scenario plus the presumed-direction mismatch (the array steers toward
/// soi_direction_deg + mismatch_deg while the source stays put).
struct ScenarioSpec {
  Scenario scenario;
  double mismatch_deg = 0.0;
};

inline ScenarioSpec scenario_from_json(const json& root) {
  ScenarioSpec out;
  out.scenario.soi_direction_deg = 10.0;
  out.scenario.interferers = {{-30.0, 100.0}, {50.0, 100.0}};
  out.scenario.snapshots = 100;
  if (!root.contains("scenario")) return out;
  const json& j = root.at("scenario");
  expect_keys(j,
              {"soi_direction_deg", "soi_power", "interferers", "noise_power", "snapshots",
               "mismatch_deg"},
              "scenario");
  out.scenario.soi_direction_deg = j.value("soi_direction_deg", out.scenario.soi_direction_deg);
  out.scenario.soi_power = j.value("soi_power", out.scenario.soi_power);
  out.scenario.noise_power = j.value("noise_power", out.scenario.noise_power);
  out.scenario.snapshots = j.value("snapshots", out.scenario.snapshots);
  out.mismatch_deg = j.value("mismatch_deg", 0.0);
  if (j.contains("interferers")) {
    out.scenario.interferers.clear();
    if (!j.at("interferers").is_array()) throw ConfigError("scenario.interferers must be an array");
    for (const json& e : j.at("interferers")) {
      expect_keys(e, {"direction_deg", "power"}, "scenario.interferers[]");
      Interferer itf;
      itf.direction_deg = e.value("direction_deg", 0.0);
      itf.power = e.value("power", 1.0);
      out.scenario.interferers.push_back(itf);
    }
  }
  if (!(out.scenario.soi_power > 0.0)) throw ConfigError("scenario.soi_power must be > 0");
  if (!(out.scenario.noise_power > 0.0)) throw ConfigError("scenario.noise_power must be > 0");
  if (out.scenario.snapshots < 1) throw ConfigError("scenario.snapshots must be >= 1");
  return out;
}

struct MethodSpec {
  std::string name;
  json params = json::object();

  std::string display_name() const { return params.value("label", name); }
};

inline std::vector<MethodSpec> parse_method_list(const json& root,
                                                 const std::vector<std::string>& defaults) {
  std::vector<MethodSpec> out;
  if (!root.contains("methods")) {
    for (const auto& n : defaults) out.push_back({n, json::object()});
    return out;
  }
  const json& j = root.at("methods");
  if (!j.is_array() || j.empty()) throw ConfigError("methods must be a non-empty array");
  for (const json& e : j) {
    MethodSpec m;
    if (e.is_string()) {
      m.name = e.get<std::string>();
    } else if (e.is_object()) {
      if (!e.contains("name")) throw ConfigError("method entries need a 'name'");
      m.name = e.at("name").get<std::string>();
      m.params = e;
      m.params.erase("name");
    } else {
      throw ConfigError("method entries must be strings or objects");
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline const std::map<std::string, std::set<std::string>>& adaptive_method_params() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"capon-true-r", {}},
      {"smi-capon", {}},
      {"lsmi", {"gamma"}},
      {"robust-capon", {"epsilon"}},
      {"worst-case", {"epsilon"}},
      {"min-dispersion", {"p"}},
      {"doubly-constrained", {"epsilon_a"}},
      {"steering-sdr", {"sector_half_width_deg", "grid_step_deg"}},
      {"lcmv", {"derivative_constraint", "null_directions_deg"}},
  };
  return table;
}

inline void validate_adaptive_methods(const std::vector<MethodSpec>& methods) {
  const auto& table = adaptive_method_params();
  for (const auto& m : methods) {
    auto it = table.find(m.name);
    if (it == table.end()) {
      std::string names;
      for (const auto& [k, v] : table) names += (names.empty() ? "" : ", ") + k;
      throw ConfigError("unknown adaptive method '" + m.name + "' (known: " + names + ")");
    }
    for (auto p = m.params.begin(); p != m.params.end(); ++p)
      if (p.key() != "label" && !it->second.count(p.key()))
        throw ConfigError("method '" + m.name + "' does not take parameter '" + p.key() + "'");
  }
}

inline int parse_quantized_bits(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0 || name.size() <= prefix.size()) return -1;
  int bits = 0;
  for (std::size_t i = prefix.size(); i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return -1;
    bits = bits * 10 + (name[i] - '0');
    if (bits > 64) return -1;
  }
  return bits;
}

inline void validate_hybrid_methods(const std::vector<MethodSpec>& methods) {
  for (const auto& m : methods) {
    const bool plain = m.name == "digital" || m.name == "omp" || m.name == "mo";
    const int bits = parse_quantized_bits(m.name, "mo-q");
    if (!plain && bits < 0)
      throw ConfigError("unknown hybrid method '" + m.name +
                        "' (known: digital, omp, mo, mo-q<bits>)");
    if (!plain && (bits < 1 || bits > 30))
      throw ConfigError("hybrid method '" + m.name + "': bits must be in [1, 30]");
    for (auto p = m.params.begin(); p != m.params.end(); ++p)
      if (p.key() != "label")
        throw ConfigError("hybrid method '" + m.name + "' does not take parameter '" + p.key() +
                          "'");
  }
}

struct SweepSpec {
  std::string variable;
  std::vector<double> values;
};

inline SweepSpec sweep_from_json(const json& root, const SweepSpec& dflt,
                                 const std::set<std::string>& allowed_vars) {
  SweepSpec out = dflt;
  if (root.contains("sweep")) {
    const json& j = root.at("sweep");
    expect_keys(j, {"variable", "values"}, "sweep");
    out.variable = j.value("variable", dflt.variable);
    if (j.contains("values")) out.values = j.at("values").get<std::vector<double>>();
  }
  if (!allowed_vars.count(out.variable)) {
    std::string names;
    for (const auto& v : allowed_vars) names += (names.empty() ? "" : ", ") + v;
    throw ConfigError("sweep.variable '" + out.variable + "' not supported here (known: " + names +
                      ")");
  }
  if (out.values.empty()) throw ConfigError("sweep.values must be non-empty");
  return out;
}

inline int trials_from_json(const json& root, int dflt) {
  const int t = root.value("trials", dflt);
  if (t < 1) throw ConfigError("trials must be >= 1");
  return t;
}

inline std::uint64_t seed_from_json(const json& root) {
  return root.value("seed", std::uint64_t(1));
}

// ---- adaptive bench ---------------------------------------------------------------------

/// Analytic direction derivative of the steering vector (per radian), used by
/// the derivative-constrained LCMV bench method.
inline CVec steering_derivative(const ArrayGeometry& g, double theta_deg) {
  const CVec a = steering_vector(g, theta_deg);
  const double k = 2.0 * pi * g.spacing_wavelengths * std::cos(deg2rad(theta_deg));
  CVec d(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) d(i) = a(i) * cd(0.0, -k * double(i));
  return d;
}

struct AdaptiveBench {
  ArrayGeometry geometry;
  Scenario scenario;
  double mismatch_deg = 0.0;
  std::vector<MethodSpec> methods;
  SweepSpec sweep;
  int trials = 50;
  std::uint64_t seed = 1;
};

inline AdaptiveBench adaptive_bench_from_json(const json& root) {
  validate_root(root);
  AdaptiveBench b;
  b.geometry = geometry_from_json(root);
  const ScenarioSpec ss = scenario_from_json(root);
  b.scenario = ss.scenario;
  b.mismatch_deg = ss.mismatch_deg;
  b.methods = parse_method_list(
      root, {"capon-true-r", "smi-capon", "lsmi", "robust-capon", "worst-case"});
  validate_adaptive_methods(b.methods);
  b.sweep = sweep_from_json(root, {"snr_db", {-10, -5, 0, 5, 10, 15, 20}},
                            {"snr_db", "inr_db", "snapshots", "mismatch_deg"});
  b.trials = trials_from_json(root, 50);
  b.seed = seed_from_json(root);
  return b;
}

inline void apply_adaptive_sweep(Scenario& sc, double& mismatch_deg, const std::string& variable,
                                 double value) {
  if (variable == "snr_db") {
    sc.soi_power = sc.noise_power * std::pow(10.0, value / 10.0);
  } else if (variable == "inr_db") {
    for (auto& itf : sc.interferers) itf.power = sc.noise_power * std::pow(10.0, value / 10.0);
  } else if (variable == "snapshots") {
    sc.snapshots = int(std::lround(value));
    if (sc.snapshots < 1) throw ConfigError("sweep value for snapshots must be >= 1");
  } else if (variable == "mismatch_deg") {
    mismatch_deg = value;
  } else {
    throw ConfigError("unknown sweep variable: " + variable);
  }
}

/// Build the weights of one registry method from the observed snapshots.
/// All methods except capon-true-r see only the data and the presumed
/// direction; capon-true-r gets the ensemble covariance.
inline BeamformerWeights run_adaptive_method(const MethodSpec& spec, const ArrayGeometry& g,
                                             const Scenario& sc, double mismatch_deg,
                                             const CMat& y) {
  const double presumed_deg = sc.soi_direction_deg + mismatch_deg;
  const CVec abar = steering_vector(g, presumed_deg);
  const std::string& m = spec.name;
  if (m == "capon-true-r") {
    BeamformerWeights w = capon(true_covariance(g, sc), abar);
    w.method = "capon-true-r";
    return w;
  }
  const CMat rhat = sample_covariance(y);
  if (m == "smi-capon") {
    BeamformerWeights w = capon(rhat, abar);
    w.method = "smi-capon";
    return w;
  }
  if (m == "lsmi") return lsmi(rhat, abar, spec.params.value("gamma", 10.0 * sc.noise_power));
  if (m == "robust-capon")
    return robust_capon(rhat, abar, spec.params.value("epsilon", 0.3)).weights;
  if (m == "worst-case") return worst_case(rhat, abar, spec.params.value("epsilon", 0.5));
  if (m == "min-dispersion") return min_dispersion(y, abar, spec.params.value("p", 1.0));
  if (m == "doubly-constrained")
    return doubly_constrained(rhat, abar,
                              spec.params.value("epsilon_a", 0.3 * double(g.n_elements)))
        .weights;
  if (m == "steering-sdr") {
    const double hw = spec.params.value("sector_half_width_deg", 6.0);
    const double gs = spec.params.value("grid_step_deg", 0.5);
    const SectorMatrix sector = sector_matrices(g, presumed_deg - hw, presumed_deg + hw, gs);
    return steering_estimate_sdr(rhat, sector).weights;
  }
  if (m == "lcmv") {
    std::vector<CVec> cols{abar};
    if (spec.params.value("derivative_constraint", true))
      cols.push_back(steering_derivative(g, presumed_deg));
    if (spec.params.contains("null_directions_deg"))
      for (double th : spec.params.at("null_directions_deg").get<std::vector<double>>())
        cols.push_back(steering_vector(g, th));
    CMat c(g.n_elements, Eigen::Index(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) c.col(Eigen::Index(k)) = cols[k];
    CVec u = CVec::Zero(Eigen::Index(cols.size()));
    u(0) = 1.0;
    return lcmv(rhat, c, u);
  }
  throw ConfigError("unknown adaptive method: " + m);
}

/// Mean output SINR (dB) for every method and sweep value, with the analytic
/// optimum as a reference row.
inline ResultTable run_adaptive_bench(const AdaptiveBench& b) {
  ResultTable table;
  table.sweep_variable = b.sweep.variable;
  RuntimeLog total("sinr-curve total");
  const int nm = int(b.methods.size());
  for (std::size_t s = 0; s < b.sweep.values.size(); ++s) {
    const double value = b.sweep.values[s];
    Scenario sc = b.scenario;
    double mismatch = b.mismatch_deg;
    apply_adaptive_sweep(sc, mismatch, b.sweep.variable, value);
    const double opt_db = 10.0 * std::log10(optimal_sinr(b.geometry, sc));
    std::vector<std::vector<double>> samples(nm + 1, std::vector<double>(b.trials, 0.0));
    {
      RuntimeLog lap("sinr-curve " + b.sweep.variable + "=" + fmt_double(value) + " (" +
                     std::to_string(b.trials) + " trials)");
      parallel_trials(b.trials, [&](int t) {
        Rng rng(derive_seed(b.seed, s, std::uint64_t(t)));
        const CMat y = generate_snapshots(b.geometry, sc, rng);
        for (int k = 0; k < nm; ++k) {
          const BeamformerWeights w = run_adaptive_method(b.methods[k], b.geometry, sc, mismatch, y);
          samples[k][t] = output_sinr_db(w.w, b.geometry, sc);
        }
        samples[nm][t] = opt_db;
      });
    }
    for (int k = 0; k <= nm; ++k) {
      const auto [mean, se] = mean_and_stderr(samples[k]);
      ResultRow row;
      row.sweep_value = value;
      row.method = k < nm ? b.methods[k].display_name() : "optimal";
      row.metric = "output_sinr_db";
      row.mean = mean;
      row.std_error = se;
      row.trials = b.trials;
      table.rows.push_back(row);
      table.raw.push_back(samples[k]);
    }
  }
  return table;
}

// ---- beampattern run -----------------------------------------------------------------------

struct BeampatternRun {
  ArrayGeometry geometry;
  Scenario scenario;
  double mismatch_deg = 0.0;
  MethodSpec method{"capon-true-r", json::object()};
  double theta_min_deg = -89.5;
  double theta_max_deg = 89.5;
  double step_deg = 0.5;
  std::uint64_t seed = 1;
};

inline BeampatternRun beampattern_from_json(const json& root) {
  validate_root(root);
  BeampatternRun r;
  r.geometry = geometry_from_json(root);
  const ScenarioSpec ss = scenario_from_json(root);
  r.scenario = ss.scenario;
  r.mismatch_deg = ss.mismatch_deg;
  r.seed = seed_from_json(root);
  if (root.contains("beampattern")) {
    const json& j = root.at("beampattern");
    expect_keys(j, {"method", "theta_min_deg", "theta_max_deg", "step_deg"}, "beampattern");
    r.theta_min_deg = j.value("theta_min_deg", r.theta_min_deg);
    r.theta_max_deg = j.value("theta_max_deg", r.theta_max_deg);
    r.step_deg = j.value("step_deg", r.step_deg);
    if (j.contains("method")) {
      const json& m = j.at("method");
      if (m.is_string()) {
        r.method = {m.get<std::string>(), json::object()};
      } else {
        if (!m.contains("name")) throw ConfigError("beampattern.method needs a 'name'");
        r.method.name = m.at("name").get<std::string>();
        r.method.params = m;
        r.method.params.erase("name");
      }
    }
  }
  validate_adaptive_methods({r.method});
  if (!(r.step_deg > 0.0) || !(r.theta_min_deg < r.theta_max_deg))
    throw ConfigError("beampattern grid is empty");
  return r;
}

struct BeampatternResult {
  RVec theta_deg;
  RVec power_linear;
  BeamformerWeights weights;
};

inline BeampatternResult run_beampattern(const BeampatternRun& r) {
  RuntimeLog total("beampattern total");
  Rng rng(derive_seed(r.seed, 0, 0));
  const CMat y = generate_snapshots(r.geometry, r.scenario, rng);
  BeampatternResult out;
  out.weights = run_adaptive_method(r.method, r.geometry, r.scenario, r.mismatch_deg, y);
  const int count = int(std::floor((r.theta_max_deg - r.theta_min_deg) / r.step_deg + 1e-9)) + 1;
  out.theta_deg.resize(count);
  for (int i = 0; i < count; ++i) out.theta_deg(i) = r.theta_min_deg + i * r.step_deg;
  out.power_linear = beampattern(out.weights.w, r.geometry, out.theta_deg);
  return out;
}

// ---- hybrid bench ----------------------------------------------------------------------------

struct HybridBench {
  HybridConfig config;
  double carrier_freq_hz = 28e9;
  double bandwidth_hz = 0.0;
  double spacing_wavelengths = 0.5;
  int n_paths = 3;
  double angle_spread_deg = 60.0;
  std::vector<MethodSpec> methods;
  SweepSpec sweep;
  int trials = 10;
  std::uint64_t seed = 1;

  ArrayGeometry tx_geometry() const {
    ArrayGeometry g;
    g.n_elements = config.n_tx;
    g.spacing_wavelengths = spacing_wavelengths;
    g.carrier_freq_hz = carrier_freq_hz;
    return g;
  }
};

inline void hybrid_section_common(const json& j, HybridBench& b) {
  b.config.n_tx = j.value("n_tx", b.config.n_tx);
  b.config.n_rx = j.value("n_rx", b.config.n_rx);
  b.config.n_rf = j.value("n_rf", b.config.n_rf);
  b.config.n_streams = j.value("n_streams", b.config.n_streams);
  b.config.n_subcarriers = j.value("n_subcarriers", b.config.n_subcarriers);
  b.carrier_freq_hz = j.value("carrier_freq_hz", b.carrier_freq_hz);
  b.bandwidth_hz = j.value("bandwidth_hz", b.bandwidth_hz);
  b.spacing_wavelengths = j.value("spacing_wavelengths", b.spacing_wavelengths);
  b.n_paths = j.value("n_paths", b.n_paths);
  b.angle_spread_deg = j.value("angle_spread_deg", b.angle_spread_deg);
  if (b.config.n_streams < 1 || b.config.n_rf < b.config.n_streams ||
      b.config.n_rf > b.config.n_tx)
    throw ConfigError("hybrid: need 1 <= n_streams <= n_rf <= n_tx");
  if (b.config.n_rx < b.config.n_streams)
    throw ConfigError("hybrid: need n_rx >= n_streams");
  if (b.config.n_subcarriers < 1) throw ConfigError("hybrid: n_subcarriers must be >= 1");
  if (b.n_paths < 1) throw ConfigError("hybrid: n_paths must be >= 1");
}

inline HybridBench hybrid_bench_from_json(const json& root) {
  validate_root(root);
  HybridBench b;
  if (root.contains("hybrid")) {
    const json& j = root.at("hybrid");
    expect_keys(j,
                {"n_tx", "n_rx", "n_rf", "n_streams", "n_subcarriers", "carrier_freq_hz",
                 "bandwidth_hz", "spacing_wavelengths", "n_paths", "angle_spread_deg"},
                "hybrid");
    hybrid_section_common(j, b);
  }
  b.methods = parse_method_list(root, {"digital", "omp", "mo"});
  validate_hybrid_methods(b.methods);
  b.sweep = sweep_from_json(root, {"snr_db", {-10, -5, 0, 5, 10}}, {"snr_db"});
  b.trials = trials_from_json(root, 10);
  b.seed = seed_from_json(root);
  return b;
}

/// Per-(sweep, trial) hybrid spectral efficiencies. The channel draw depends
/// only on the derived seed; designs are target fits and the SNR enters only
/// through the rate expression.
inline ResultTable run_hybrid_bench(const HybridBench& b) {
  ResultTable table;
  table.sweep_variable = b.sweep.variable;
  RuntimeLog total("hybrid-se total");
  const ArrayGeometry tx = b.tx_geometry();
  const int nm = int(b.methods.size());
  const int ns = b.config.n_streams;
  const int msub = b.config.n_subcarriers;
  const bool wideband = msub > 1;

  for (std::size_t s = 0; s < b.sweep.values.size(); ++s) {
    const double snr_db = b.sweep.values[s];
    const double noise = std::pow(10.0, -snr_db / 10.0) * b.config.rx_power;
    std::vector<std::vector<double>> samples(nm, std::vector<double>(b.trials, 0.0));
    {
      RuntimeLog lap("hybrid-se snr_db=" + fmt_double(snr_db) + " (" + std::to_string(b.trials) +
                     " trials)");
      parallel_trials(b.trials, [&](int t) {
        Rng rng(derive_seed(b.seed, s, std::uint64_t(t)));
        const ChannelMatrix ch = geometric_channel(tx, b.config.n_rx, b.n_paths, rng,
                                                   b.angle_spread_deg, msub, b.bandwidth_hz);
        std::vector<CMat> h_list;
        std::vector<CMat> targets;
        if (wideband) {
          h_list = ch.per_subcarrier;
          for (const CMat& h : h_list) targets.push_back(optimal_digital(h, ns));
        } else {
          h_list = {ch.matrix};
          targets = {optimal_digital(ch.matrix, ns)};
        }
        auto rate = [&](const std::vector<CMat>& f_list) {
          return spectral_efficiency(h_list, f_list, b.config.rx_power, noise, ns);
        };
        auto hybrid_rate = [&](const HybridBeamformer& hb) {
          std::vector<CMat> f_list;
          for (std::size_t m = 0; m < hb.f_bb.size(); ++m) f_list.push_back(effective_precoder(hb, int(m)));
          return rate(f_list);
        };
        // The manifold design is shared by "mo" and every "mo-q<bits>" row.
        HybridBeamformer mo_design;
        bool have_mo = false;
        auto ensure_mo = [&]() {
          if (have_mo) return;
          mo_design = wideband ? wideband_hybrid(targets, b.config.n_rf)
                               : mo_hybrid(targets[0], b.config.n_rf);
          have_mo = true;
        };
        for (int k = 0; k < nm; ++k) {
          const std::string& name = b.methods[k].name;
          if (name == "digital") {
            samples[k][t] = rate(targets);
          } else if (name == "omp") {
            const CMat center_target = optimal_digital(ch.matrix, ns);
            HybridBeamformer hb = omp_hybrid(center_target, b.config.n_rf, steering_dictionary(tx));
            if (wideband) {
              hb.f_bb.assign(msub, CMat());
              for (int m = 0; m < msub; ++m) hb.f_bb[m] = pinv_solve(hb.f_rf, targets[m]);
              normalize_hybrid(hb);
            }
            samples[k][t] = hybrid_rate(hb);
          } else if (name == "mo") {
            ensure_mo();
            samples[k][t] = hybrid_rate(mo_design);
          } else {
            ensure_mo();
            const int bits = parse_quantized_bits(name, "mo-q");
            samples[k][t] = hybrid_rate(quantize_hybrid(mo_design, targets, bits));
          }
        }
      });
    }
    for (int k = 0; k < nm; ++k) {
      const auto [mean, se] = mean_and_stderr(samples[k]);
      table.rows.push_back({b.sweep.values[s], b.methods[k].display_name(),
                            "spectral_efficiency_bps_hz", mean, se, b.trials});
      table.raw.push_back(samples[k]);
    }
  }
  return table;
}

// ---- multicast bench ---------------------------------------------------------------------------

struct MulticastBench {
  int n_antennas = 4;
  int n_users = 3;
  double snr_min_db = 0.0;
  double noise_power = 1.0;
  int randomizations = 200;
  bool refine = true;
  std::vector<MulticastUser> explicit_users;  // when non-empty, channels are fixed
  SweepSpec sweep;
  int trials = 10;
  std::uint64_t seed = 1;
};

inline MulticastBench multicast_bench_from_json(const json& root) {
  validate_root(root);
  MulticastBench b;
  if (root.contains("multicast")) {
    const json& j = root.at("multicast");
    expect_keys(j,
                {"n_antennas", "n_users", "snr_min_db", "noise_power", "randomizations", "refine",
                 "users"},
                "multicast");
    b.n_antennas = j.value("n_antennas", b.n_antennas);
    b.n_users = j.value("n_users", b.n_users);
    b.snr_min_db = j.value("snr_min_db", b.snr_min_db);
    b.noise_power = j.value("noise_power", b.noise_power);
    b.randomizations = j.value("randomizations", b.randomizations);
    b.refine = j.value("refine", b.refine);
    if (j.contains("users")) {
      for (const json& e : j.at("users")) {
        expect_keys(e, {"channel", "snr_min_db", "noise_power"}, "multicast.users[]");
        MulticastUser u;
        u.channel = vec_from_interleaved(e.at("channel"));
        u.snr_min = std::pow(10.0, e.value("snr_min_db", b.snr_min_db) / 10.0);
        u.noise_power = e.value("noise_power", b.noise_power);
        if (u.channel.size() != b.n_antennas)
          throw ConfigError("multicast.users[].channel must have n_antennas entries");
        b.explicit_users.push_back(std::move(u));
      }
      if (b.explicit_users.empty()) throw ConfigError("multicast.users must be non-empty");
    }
  }
  if (b.n_antennas < 1) throw ConfigError("multicast.n_antennas must be >= 1");
  if (b.n_users < 1) throw ConfigError("multicast.n_users must be >= 1");
  if (b.randomizations < 1) throw ConfigError("multicast.randomizations must be >= 1");
  b.sweep = sweep_from_json(root, {"n_users", {double(b.n_users)}}, {"n_users"});
  if (!b.explicit_users.empty() &&
      (b.sweep.values.size() != 1 || b.sweep.values[0] != double(b.explicit_users.size())))
    throw ConfigError("multicast: cannot sweep n_users with explicit user channels");
  b.trials = trials_from_json(root, 10);
  b.seed = seed_from_json(root);
  return b;
}

inline ResultTable run_multicast_bench(const MulticastBench& b) {
  ResultTable table;
  table.sweep_variable = b.sweep.variable;
  RuntimeLog total("multicast total");
  const std::vector<std::string> metrics = {"tx_power", "sdr_lower_bound", "approx_ratio",
                                            "rank_ratio"};
  for (std::size_t s = 0; s < b.sweep.values.size(); ++s) {
    const int n_users = int(std::lround(b.sweep.values[s]));
    if (n_users < 1) throw ConfigError("multicast sweep: n_users must be >= 1");
    std::vector<std::vector<double>> samples(metrics.size(), std::vector<double>(b.trials, 0.0));
    {
      RuntimeLog lap("multicast n_users=" + std::to_string(n_users) + " (" +
                     std::to_string(b.trials) + " trials)");
      parallel_trials(b.trials, [&](int t) {
        Rng rng(derive_seed(b.seed, s, std::uint64_t(t)));
        std::vector<MulticastUser> users;
        if (!b.explicit_users.empty()) {
          users = b.explicit_users;
        } else {
          const double rho = std::pow(10.0, b.snr_min_db / 10.0);
          for (int u = 0; u < n_users; ++u) {
            MulticastUser mu;
            mu.channel = rng.cnormal_vector(b.n_antennas);
            mu.snr_min = rho;
            mu.noise_power = b.noise_power;
            users.push_back(std::move(mu));
          }
        }
        MulticastSolution sol = multicast_sdr(users, rng, b.randomizations);
        double power = sol.rounded_value;
        if (b.refine) {
          const MulticastRefineResult ref = alternating_refine(users, sol.w);
          power = ref.value;
        }
        samples[0][t] = power;
        samples[1][t] = sol.sdr_value;
        samples[2][t] = power / std::max(sol.sdr_value, 1e-300);
        samples[3][t] = sol.rank_ratio;
      });
    }
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      const auto [mean, se] = mean_and_stderr(samples[k]);
      table.rows.push_back(
          {double(n_users), "sdr", metrics[k], mean, se, b.trials});
      table.raw.push_back(samples[k]);
    }
  }
  return table;
}

// ---- IRS bench -----------------------------------------------------------------------------------

struct IrsBench {
  int n_antennas = 4;
  int n_irs = 32;
  double p_max = 1.0;
  int multi_start = 4;
  int max_iter = 100;
  bool has_explicit = false;
  IrsScenario explicit_scenario;
  SweepSpec sweep;
  int trials = 10;
  std::uint64_t seed = 1;
};

inline IrsBench irs_bench_from_json(const json& root) {
  validate_root(root);
  IrsBench b;
  if (root.contains("irs")) {
    const json& j = root.at("irs");
    expect_keys(j, {"n_antennas", "n_irs", "p_max", "multi_start", "max_iter", "h_bs", "h_irs",
                    "h_d"},
                "irs");
    b.n_antennas = j.value("n_antennas", b.n_antennas);
    b.n_irs = j.value("n_irs", b.n_irs);
    b.p_max = j.value("p_max", b.p_max);
    b.multi_start = j.value("multi_start", b.multi_start);
    b.max_iter = j.value("max_iter", b.max_iter);
    const int have = int(j.contains("h_bs")) + int(j.contains("h_irs")) + int(j.contains("h_d"));
    if (have == 3) {
      b.has_explicit = true;
      b.explicit_scenario.h_bs = mat_from_interleaved(j.at("h_bs"), b.n_irs, b.n_antennas);
      b.explicit_scenario.h_irs = vec_from_interleaved(j.at("h_irs"));
      b.explicit_scenario.h_d = vec_from_interleaved(j.at("h_d"));
      b.explicit_scenario.p_max = b.p_max;
      if (b.explicit_scenario.h_irs.size() != b.n_irs ||
          b.explicit_scenario.h_d.size() != b.n_antennas)
        throw ConfigError("irs: explicit channel dimensions are inconsistent");
    } else if (have != 0) {
      throw ConfigError("irs: give all of h_bs, h_irs, h_d or none");
    }
  }
  if (b.n_antennas < 1 || b.n_irs < 1) throw ConfigError("irs: sizes must be >= 1");
  if (!(b.p_max > 0.0)) throw ConfigError("irs.p_max must be > 0");
  if (b.multi_start < 1) throw ConfigError("irs.multi_start must be >= 1");
  b.sweep = sweep_from_json(root, {"n_irs", {double(b.n_irs)}}, {"n_irs"});
  if (b.has_explicit && (b.sweep.values.size() != 1 || b.sweep.values[0] != double(b.n_irs)))
    throw ConfigError("irs: cannot sweep n_irs with explicit channels");
  b.trials = trials_from_json(root, 10);
  b.seed = seed_from_json(root);
  return b;
}

inline ResultTable run_irs_bench(const IrsBench& b) {
  ResultTable table;
  table.sweep_variable = b.sweep.variable;
  RuntimeLog total("irs total");
  const std::vector<std::string> metrics = {"objective", "gain_db_over_no_irs", "iterations"};
  for (std::size_t s = 0; s < b.sweep.values.size(); ++s) {
    const int n_irs = int(std::lround(b.sweep.values[s]));
    if (n_irs < 1) throw ConfigError("irs sweep: n_irs must be >= 1");
    std::vector<std::vector<double>> samples(metrics.size(), std::vector<double>(b.trials, 0.0));
    {
      RuntimeLog lap("irs n_irs=" + std::to_string(n_irs) + " (" + std::to_string(b.trials) +
                     " trials)");
      parallel_trials(b.trials, [&](int t) {
        Rng rng(derive_seed(b.seed, s, std::uint64_t(t)));
        IrsScenario sc;
        if (b.has_explicit) {
          sc = b.explicit_scenario;
        } else {
          sc.h_bs = rng.cnormal_matrix(n_irs, b.n_antennas);
          sc.h_irs = rng.cnormal_vector(n_irs);
          sc.h_d = rng.cnormal_vector(b.n_antennas);
          sc.p_max = b.p_max;
        }
        const IrsSolution sol = irs_alternating(sc, rng, b.multi_start, b.max_iter);
        const double budget = sc.norm_budget();
        const double baseline = budget * budget * sc.h_d.squaredNorm();
        samples[0][t] = sol.objective;
        samples[1][t] =
            baseline > 0.0 ? 10.0 * std::log10(std::max(sol.objective, 1e-300) / baseline) : 0.0;
        samples[2][t] = double(sol.iterations);
      });
    }
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      const auto [mean, se] = mean_and_stderr(samples[k]);
      table.rows.push_back({double(n_irs), "alternating", metrics[k], mean, se, b.trials});
      table.raw.push_back(samples[k]);
    }
  }
  return table;
}

// ---- JRC bench ------------------------------------------------------------------------------------

struct JrcBench {
  HybridBench hybrid;  // sizes + channel model (sweep field unused)
  std::vector<double> radar_targets_deg = {-30.0, 30.0};
  int max_outer = 20;
  double snr_db = 0.0;
  SweepSpec sweep;
  int trials = 3;
  std::uint64_t seed = 1;
};

inline JrcBench jrc_bench_from_json(const json& root) {
  validate_root(root);
  JrcBench b;
  if (root.contains("hybrid")) {
    const json& j = root.at("hybrid");
    expect_keys(j,
                {"n_tx", "n_rx", "n_rf", "n_streams", "n_subcarriers", "carrier_freq_hz",
                 "bandwidth_hz", "spacing_wavelengths", "n_paths", "angle_spread_deg"},
                "hybrid");
    hybrid_section_common(j, b.hybrid);
  }
  if (b.hybrid.config.n_subcarriers != 1)
    throw ConfigError("jrc: only narrowband (n_subcarriers = 1) is supported");
  if (root.contains("jrc")) {
    const json& j = root.at("jrc");
    expect_keys(j, {"radar_targets_deg", "max_outer", "snr_db"}, "jrc");
    if (j.contains("radar_targets_deg"))
      b.radar_targets_deg = j.at("radar_targets_deg").get<std::vector<double>>();
    b.max_outer = j.value("max_outer", b.max_outer);
    b.snr_db = j.value("snr_db", b.snr_db);
  }
  if (b.radar_targets_deg.empty()) throw ConfigError("jrc.radar_targets_deg must be non-empty");
  if (int(b.radar_targets_deg.size()) > b.hybrid.config.n_streams)
    throw ConfigError("jrc: need #radar targets <= n_streams for the row-orthonormal mixer");
  for (double th : b.radar_targets_deg)
    if (!(th > -90.0 && th < 90.0)) throw ConfigError("jrc: target angles must lie in (-90, 90)");
  if (b.max_outer < 1) throw ConfigError("jrc.max_outer must be >= 1");
  b.sweep = sweep_from_json(root, {"zeta", {0.0, 0.25, 0.5, 0.75, 1.0}}, {"zeta"});
  for (double z : b.sweep.values)
    if (!(z >= 0.0 && z <= 1.0)) throw ConfigError("jrc sweep: zeta values must lie in [0, 1]");
  b.trials = trials_from_json(root, 3);
  b.seed = seed_from_json(root);
  return b;
}

inline ResultTable run_jrc_bench(const JrcBench& b) {
  ResultTable table;
  table.sweep_variable = "zeta";
  RuntimeLog total("jrc total");
  const ArrayGeometry tx = b.hybrid.tx_geometry();
  const CMat f_r = radar_steering_matrix(tx, b.radar_targets_deg);
  const double noise = std::pow(10.0, -b.snr_db / 10.0);
  const int ns = b.hybrid.config.n_streams;
  const std::vector<std::string> metrics = {"spectral_efficiency_bps_hz", "radar_residual",
                                            "tradeoff_objective"};
  for (std::size_t s = 0; s < b.sweep.values.size(); ++s) {
    const double zeta = b.sweep.values[s];
    std::vector<std::vector<double>> samples(metrics.size(), std::vector<double>(b.trials, 0.0));
    {
      RuntimeLog lap("jrc zeta=" + fmt_double(zeta) + " (" + std::to_string(b.trials) +
                     " trials)");
      parallel_trials(b.trials, [&](int t) {
        Rng rng(derive_seed(b.seed, s, std::uint64_t(t)));
        const ChannelMatrix ch =
            geometric_channel(tx, b.hybrid.config.n_rx, b.hybrid.n_paths, rng,
                              b.hybrid.angle_spread_deg);
        const CMat f_c = optimal_digital(ch.matrix, ns);
        const JrcResult jr = jrc_hybrid(f_c, f_r, zeta, b.hybrid.config.n_rf, b.max_outer);
        const CMat f_eff = effective_precoder(jr.hybrid);
        samples[0][t] = spectral_efficiency(ch.matrix, f_eff, 1.0, noise, ns);
        const CMat p_fit = orthogonal_procrustes(f_r, f_eff);
        samples[1][t] = (f_eff - f_r * p_fit).squaredNorm();
        samples[2][t] = jr.objective_trace.back();
      });
    }
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      const auto [mean, se] = mean_and_stderr(samples[k]);
      table.rows.push_back({zeta, "jrc", metrics[k], mean, se, b.trials});
      table.raw.push_back(samples[k]);
    }
  }
  return table;
}

// ---- beam-squint experiment --------------------------------------------------------------------------

struct SquintExperiment {
  double carrier_freq_hz = 3.0e11;
  double bandwidth_hz = 3.0e10;
  double theta_deg = 60.0;  // departure angle of the dominant path
  double aoa_deg = 0.0;
  int n_tx = 64;
  int n_rx = 4;
  int n_rf = 4;
  int n_streams = 1;
  int n_subcarriers = 8;
  double snr_db = 0.0;
  double spacing_wavelengths = 0.5;

  ArrayGeometry tx_geometry() const {
    ArrayGeometry g;
    g.n_elements = n_tx;
    g.spacing_wavelengths = spacing_wavelengths;
    g.carrier_freq_hz = carrier_freq_hz;
    return g;
  }
};

inline SquintExperiment squint_from_json(const json& root) {
  validate_root(root);
  SquintExperiment e;
  if (root.contains("squint")) {
    const json& j = root.at("squint");
    expect_keys(j,
                {"carrier_freq_hz", "bandwidth_hz", "theta_deg", "aoa_deg", "n_tx", "n_rx", "n_rf",
                 "n_streams", "n_subcarriers", "snr_db", "spacing_wavelengths"},
                "squint");
    e.carrier_freq_hz = j.value("carrier_freq_hz", e.carrier_freq_hz);
    e.bandwidth_hz = j.value("bandwidth_hz", e.bandwidth_hz);
    e.theta_deg = j.value("theta_deg", e.theta_deg);
    e.aoa_deg = j.value("aoa_deg", e.aoa_deg);
    e.n_tx = j.value("n_tx", e.n_tx);
    e.n_rx = j.value("n_rx", e.n_rx);
    e.n_rf = j.value("n_rf", e.n_rf);
    e.n_streams = j.value("n_streams", e.n_streams);
    e.n_subcarriers = j.value("n_subcarriers", e.n_subcarriers);
    e.snr_db = j.value("snr_db", e.snr_db);
    e.spacing_wavelengths = j.value("spacing_wavelengths", e.spacing_wavelengths);
  }
  if (!(e.carrier_freq_hz > 0.0) || !(e.bandwidth_hz >= 0.0) ||
      !(e.bandwidth_hz < 2.0 * e.carrier_freq_hz))
    throw ConfigError("squint: invalid band");
  if (!(e.theta_deg > -90.0 && e.theta_deg < 90.0) || !(e.aoa_deg > -90.0 && e.aoa_deg < 90.0))
    throw ConfigError("squint: angles must lie in (-90, 90)");
  if (e.n_streams < 1 || e.n_rf < e.n_streams || e.n_rf > e.n_tx)
    throw ConfigError("squint: need 1 <= n_streams <= n_rf <= n_tx");
  if (e.n_rx < e.n_streams) throw ConfigError("squint: need n_rx >= n_streams");
  if (e.n_subcarriers < 1) throw ConfigError("squint: n_subcarriers must be >= 1");
  return e;
}

/// Deterministic squint study on a single line-of-sight path: a carrier-
/// designed OMP precoder is evaluated across the band as-is and with the
/// squint-aware per-subcarrier digital correction. Rows: per-subcarrier
/// analytic pointing drift, per-subcarrier rates, and band-average rates
/// (sweep_value -1) plus the analytic band-edge deviations.
inline ResultTable run_squint_experiment(const SquintExperiment& e) {
  ResultTable table;
  table.sweep_variable = "subcarrier";
  RuntimeLog total("squint total");
  const ArrayGeometry tx = e.tx_geometry();
  ArrayGeometry rx = tx;
  rx.n_elements = e.n_rx;
  const std::vector<double> freqs =
      subcarrier_frequencies(e.carrier_freq_hz, e.bandwidth_hz, e.n_subcarriers);
  const double amp = std::sqrt(double(e.n_tx) * double(e.n_rx));
  auto channel_at = [&](double f) {
    return CMat(amp * steering_vector_at(rx, e.aoa_deg, f) *
                steering_vector_at(tx, e.theta_deg, f).adjoint());
  };
  std::vector<CMat> h_m;
  for (double f : freqs) h_m.push_back(channel_at(f));
  const CMat h_center = channel_at(e.carrier_freq_hz);
  const double noise = std::pow(10.0, -e.snr_db / 10.0);

  // Carrier-frequency design, reused verbatim on every subcarrier.
  const CMat center_target = optimal_digital(h_center, e.n_streams);
  HybridBeamformer hb = omp_hybrid(center_target, e.n_rf, steering_dictionary(tx));
  HybridBeamformer flat = hb;
  flat.f_bb.assign(e.n_subcarriers, hb.f_bb[0]);
  normalize_hybrid(flat);

  // Squint-aware digital correction of the same analog stage.
  const SquintCorrection corr = beam_squint_correct(flat.f_rf, flat.f_bb, freqs, tx);
  HybridBeamformer fixed = flat;
  fixed.f_bb = corr.f_bb;
  normalize_hybrid(fixed);

  double se_flat_acc = 0.0, se_fixed_acc = 0.0;
  for (int m = 0; m < e.n_subcarriers; ++m) {
    const double ratio = e.carrier_freq_hz / freqs[std::size_t(m)];
    const double s = std::clamp(ratio * std::sin(deg2rad(e.theta_deg)), -1.0, 1.0);
    const double dev = rad2deg(std::asin(s)) - e.theta_deg;
    const double se_flat = spectral_efficiency(h_m[std::size_t(m)], effective_precoder(flat, m),
                                               1.0, noise, e.n_streams);
    const double se_fixed = spectral_efficiency(h_m[std::size_t(m)], effective_precoder(fixed, m),
                                                1.0, noise, e.n_streams);
    se_flat_acc += se_flat;
    se_fixed_acc += se_fixed;
    table.rows.push_back({double(m), "analytic", "pointing_deviation_deg", dev, 0.0, 1});
    table.rows.push_back({double(m), "uncorrected", "spectral_efficiency_bps_hz", se_flat, 0.0, 1});
    table.rows.push_back({double(m), "corrected", "spectral_efficiency_bps_hz", se_fixed, 0.0, 1});
    table.raw.push_back({dev});
    table.raw.push_back({se_flat});
    table.raw.push_back({se_fixed});
  }
  const SquintDeviation dev = beam_squint_deviation(e.carrier_freq_hz, e.bandwidth_hz, e.theta_deg);
  auto push_summary = [&](const std::string& method, const std::string& metric, double v) {
    table.rows.push_back({-1.0, method, metric, v, 0.0, 1});
    table.raw.push_back({v});
  };
  push_summary("analytic", "deviation_low_deg", dev.low_deg);
  push_summary("analytic", "deviation_high_deg", dev.high_deg);
  push_summary("uncorrected", "band_average_se_bps_hz", se_flat_acc / e.n_subcarriers);
  push_summary("corrected", "band_average_se_bps_hz", se_fixed_acc / e.n_subcarriers);
  return table;
}

// ---- dataset export ------------------------------------------------------------------------------------

struct DatasetSpec {
  HybridBench hybrid;  // sizes + channel model (sweep/trials unused)
  int count = 8;
  std::string design = "mo";  // or "omp"
  std::uint64_t seed = 1;
};

inline DatasetSpec dataset_from_json(const json& root) {
  validate_root(root);
  DatasetSpec d;
  if (root.contains("hybrid")) {
    const json& j = root.at("hybrid");
    expect_keys(j,
                {"n_tx", "n_rx", "n_rf", "n_streams", "n_subcarriers", "carrier_freq_hz",
                 "bandwidth_hz", "spacing_wavelengths", "n_paths", "angle_spread_deg"},
                "hybrid");
    hybrid_section_common(j, d.hybrid);
  }
  if (d.hybrid.config.n_subcarriers != 1)
    throw ConfigError("dataset: only narrowband (n_subcarriers = 1) is supported");
  if (root.contains("dataset")) {
    const json& j = root.at("dataset");
    expect_keys(j, {"count", "design"}, "dataset");
    d.count = j.value("count", d.count);
    d.design = j.value("design", d.design);
  }
  if (d.count < 0) throw ConfigError("dataset.count must be >= 0");
  if (d.design != "mo" && d.design != "omp")
    throw ConfigError("dataset.design must be 'mo' or 'omp'");
  d.seed = seed_from_json(root);
  return d;
}

/// Supervised (channel -> analog phases) pairs as JSON lines. Line 1 is a
/// schema header; sample i has x = [vec(Re H); vec(Im H)] (column-major) and
/// y = the analog stage's entry phases (column-major, radians in (-pi, pi]).
inline std::string dataset_jsonl(const DatasetSpec& d) {
  RuntimeLog total("dataset total");
  const HybridConfig& hc = d.hybrid.config;
  const int x_dim = 2 * hc.n_rx * hc.n_tx;
  const int y_dim = hc.n_tx * hc.n_rf;
  json header = {{"type", "header"},   {"version", 1},         {"design", d.design},
                 {"count", d.count},   {"n_tx", hc.n_tx},      {"n_rx", hc.n_rx},
                 {"n_rf", hc.n_rf},    {"n_streams", hc.n_streams},
                 {"x_dim", x_dim},     {"y_dim", y_dim}};
  std::string out = header.dump() + "\n";
  const ArrayGeometry tx = d.hybrid.tx_geometry();
  std::vector<std::string> lines(std::size_t(d.count));
  parallel_trials(d.count, [&](int i) {
    Rng rng(derive_seed(d.seed, 0, std::uint64_t(i)));
    const ChannelMatrix ch =
        geometric_channel(tx, hc.n_rx, d.hybrid.n_paths, rng, d.hybrid.angle_spread_deg);
    const CMat f_c = optimal_digital(ch.matrix, hc.n_streams);
    const HybridBeamformer hb = d.design == "omp"
                                    ? omp_hybrid(f_c, hc.n_rf, steering_dictionary(tx))
                                    : mo_hybrid(f_c, hc.n_rf);
    json x = json::array();
    for (Eigen::Index c = 0; c < ch.matrix.cols(); ++c)
      for (Eigen::Index r = 0; r < ch.matrix.rows(); ++r) x.push_back(ch.matrix(r, c).real());
    for (Eigen::Index c = 0; c < ch.matrix.cols(); ++c)
      for (Eigen::Index r = 0; r < ch.matrix.rows(); ++r) x.push_back(ch.matrix(r, c).imag());
    json y = json::array();
    for (Eigen::Index c = 0; c < hb.f_rf.cols(); ++c)
      for (Eigen::Index r = 0; r < hb.f_rf.rows(); ++r) y.push_back(std::arg(hb.f_rf(r, c)));
    json line = {{"type", "sample"}, {"index", i}, {"x", x}, {"y", y}};
    lines[std::size_t(i)] = line.dump();
  });
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace beamopt
