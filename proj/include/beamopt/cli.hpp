#pragma once

// Command-line front end. Eight subcommands share the flag set
//   --config <json>  --seed <uint64>  --out <path>  --format csv|json  --trials <n>
// and exit codes: 0 success, 2 configuration/usage error, 3 numeric failure.
// Output files are byte-identical across reruns for a fixed (config, seed);
// wall-clock notes go to stderr. BEAMOPT_THREADS=k parallelizes trials
// without changing any output byte.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamopt/bench.hpp"
#include "beamopt/io.hpp"

namespace beamopt {

struct CliCommon {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::string svg_path;  // beampattern only
  std::uint64_t seed = 0;
  int trials = 0;
  bool seed_given = false;
  bool trials_given = false;
};

inline json cli_load_root(const CliCommon& c) {
  json root = json::object();
  if (!c.config_path.empty()) {
    try {
      root = json::parse(read_text_file(c.config_path));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  if (c.seed_given) root["seed"] = c.seed;
  if (c.trials_given) root["trials"] = c.trials;
  return root;
}

inline void cli_emit(const CliCommon& c, const std::string& content) {
  if (c.out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    write_text_file(c.out_path, content);
  }
}

inline std::string render_table(const ResultTable& t, const std::string& format) {
  if (format == "json") return table_to_json(t).dump(2) + "\n";
  return table_to_csv(t);
}

inline int cli_run(const std::vector<std::string>& args) {
  CLI::App app{
      "beamopt - beamforming optimization bench\n"
      "Deterministic for a fixed (config, seed); set BEAMOPT_THREADS=k to\n"
      "parallelize Monte-Carlo trials without changing any output byte."};
  app.require_subcommand(1);
  CliCommon c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config_path, "JSON experiment config file");
    sub->add_option("--seed", c.seed, "master seed (overrides the config)");
    sub->add_option("--out", c.out_path, "output file (stdout when omitted)");
    sub->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--trials", c.trials, "Monte-Carlo trials (overrides the config)");
    return sub;
  };

  CLI::App* sc_beam = add_common(app.add_subcommand(
      "beampattern", "Spatial response of one adaptive beamformer on a direction grid"));
  sc_beam->add_option("--svg", c.svg_path, "also render the pattern to this SVG file");
  add_common(app.add_subcommand(
      "sinr-curve", "Mean output SINR of the adaptive-beamformer registry across a sweep"));
  add_common(app.add_subcommand(
      "hybrid-se", "Spectral efficiency of hybrid precoding designs across an SNR sweep"));
  add_common(app.add_subcommand(
      "multicast", "QoS-constrained multicast transmit power via SDR + randomization"));
  add_common(app.add_subcommand(
      "irs", "Reflecting-surface SNR maximization via alternating optimization"));
  add_common(app.add_subcommand(
      "jrc", "Radar-communication tradeoff designs across the weighting zeta"));
  add_common(app.add_subcommand(
      "squint", "Wideband beam-squint drift and the per-subcarrier digital correction"));
  add_common(app.add_subcommand(
      "dataset", "Supervised (channel -> analog phases) pairs as JSON lines"));

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("beamopt");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  c.seed_given = app.get_subcommands().front()->count("--seed") > 0;
  c.trials_given = app.get_subcommands().front()->count("--trials") > 0;
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    const json root = cli_load_root(c);
    if (cmd == "beampattern") {
      const BeampatternRun run = beampattern_from_json(root);
      const BeampatternResult res = run_beampattern(run);
      if (c.format == "json") {
        json out;
        out["method"] = res.weights.method;
        out["theta_deg"] = std::vector<double>(res.theta_deg.data(),
                                               res.theta_deg.data() + res.theta_deg.size());
        std::vector<double> db(std::size_t(res.power_linear.size()));
        for (Eigen::Index i = 0; i < res.power_linear.size(); ++i)
          db[std::size_t(i)] = 10.0 * std::log10(std::max(res.power_linear(i), 1e-300));
        out["power_db"] = db;
        out["weights_re_im"] = to_interleaved(res.weights.w);
        cli_emit(c, out.dump(2) + "\n");
      } else {
        cli_emit(c, beampattern_csv(res.theta_deg, res.power_linear));
      }
      if (!c.svg_path.empty()) {
        RVec db(res.power_linear.size());
        for (Eigen::Index i = 0; i < db.size(); ++i)
          db(i) = 10.0 * std::log10(std::max(res.power_linear(i), 1e-300));
        write_text_file(c.svg_path,
                        svg_line_plot(res.theta_deg, db, "beampattern (" + res.weights.method + ")",
                                      "direction (deg)", "power (dB)"));
      }
    } else if (cmd == "sinr-curve") {
      cli_emit(c, render_table(run_adaptive_bench(adaptive_bench_from_json(root)), c.format));
    } else if (cmd == "hybrid-se") {
      cli_emit(c, render_table(run_hybrid_bench(hybrid_bench_from_json(root)), c.format));
    } else if (cmd == "multicast") {
      cli_emit(c, render_table(run_multicast_bench(multicast_bench_from_json(root)), c.format));
    } else if (cmd == "irs") {
      cli_emit(c, render_table(run_irs_bench(irs_bench_from_json(root)), c.format));
    } else if (cmd == "jrc") {
      cli_emit(c, render_table(run_jrc_bench(jrc_bench_from_json(root)), c.format));
    } else if (cmd == "squint") {
      cli_emit(c, render_table(run_squint_experiment(squint_from_json(root)), c.format));
    } else if (cmd == "dataset") {
      cli_emit(c, dataset_jsonl(dataset_from_json(root)));  // always JSON lines
    } else {
      std::fprintf(stderr, "unknown subcommand: %s\n", cmd.c_str());
      return 2;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

}  // namespace beamopt
