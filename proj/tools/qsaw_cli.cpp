// qsaw: command-line front end for the sawtooth map localization lab.
//
//   qsaw estimate  [--config PATH]
//   qsaw classical [--config PATH] [--seed N] [--iterations T] --out FILE
//   qsaw quantum   [--config PATH] [--mode ideal|circuit|noisy] [--rf-dist PATH] --out FILE
//   qsaw analyze   [--config PATH] [--iterations T] [--rf-dist PATH] --out FILE

#include "qsaw/diagnostics.hpp"
#include "qsaw/experiment.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <thread>

using namespace qsaw;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::string rf_dist;
  std::string out;
  bool serial = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--iterations", c.iterations, "number of map iterations")->check(CLI::NonNegativeNumber);
  cmd->add_option("--rf-dist", c.rf_dist, "rf distribution file (scale,probability rows)")->check(CLI::ExistingFile);
  cmd->add_flag("--serial", c.serial, "single-threaded, bit-for-bit reproducible");
  cmd->add_option("--threads", c.threads, "worker threads (0 = hardware concurrency)");
  auto* out = cmd->add_option("--out", c.out, "output file");
  if (needs_out) out->required();
}

ScenarioConfig resolve(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? parse_config("{}") : load_config(c.config);
  if (c.seed) cfg.experiment.seed = *c.seed;
  if (!c.rf_dist.empty()) {
    cfg.experiment.rf = load_rf_distribution(c.rf_dist);
    cfg.rf_source = std::filesystem::path(c.rf_dist).filename().string();
  }
  return cfg;
}

RunOptions run_options(const Common& c) {
  RunOptions o;
  if (c.serial) {
    o.threads = 1;
  } else {
    o.threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  }
  return o;
}

std::string run_json(const Common& c, const RunOptions& o, const std::string& extra = "") {
  std::string s = "{\"serial\": " + std::string(c.serial ? "true" : "false") +
                  ", \"threads\": " + std::to_string(o.threads);
  if (!extra.empty()) s += ", " + extra;
  return s + "}";
}

void print_estimate(const ScenarioConfig& cfg) {
  const SawtoothParams& p = cfg.experiment.params;
  const LocalizationEstimates e = localization_estimates(p);
  std::printf("K %s\n", format_double(p.chaos()).c_str());
  std::printf("L %d\n", p.winding());
  std::printf("N %zu\n", p.levels());
  std::printf("T %s\n", format_double(e.period).c_str());
  std::printf("k %s\n", format_double(e.kick_strength).c_str());
  std::printf("D %s\n", format_double(e.diffusion).c_str());
  std::printf("t_star %s\n", format_double(e.onset).c_str());
  std::printf("xi %s\n", format_double(e.length).c_str());
  std::printf("perturbative %s\n", e.perturbative ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum sawtooth map localization lab"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Common est, cls, qnt, ana;
  std::string mode = "ideal";
  auto* estimate = app.add_subcommand("estimate", "print derived map parameters and localization estimates");
  estimate->add_option("--config", est.config, "JSON configuration file")->check(CLI::ExistingFile);
  auto* classical = app.add_subcommand("classical", "classical ensemble momentum histograms");
  add_common(classical, cls, true);
  auto* quantum = app.add_subcommand("quantum", "quantum momentum distributions and diagnostics");
  add_common(quantum, qnt, true);
  quantum->add_option("--mode", mode, "ideal, circuit or noisy")
      ->check(CLI::IsMember({"ideal", "circuit", "noisy"}));
  auto* analyze = app.add_subcommand("analyze", "superoperator and Kraus analysis of the error stacks");
  add_common(analyze, ana, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*estimate) {
      print_estimate(resolve(est));
    } else if (*classical) {
      ScenarioConfig cfg = resolve(cls);
      if (cls.iterations) cfg.classical_iterations = *cls.iterations;
      const RunOptions o = run_options(cls);
      const ClassicalResult r = compute_classical(cfg, o);
      write_classical(r, cls.out);
      write_manifest("classical", cfg, cls.out, {cls.out}, run_json(cls, o));
    } else if (*quantum) {
      ScenarioConfig cfg = resolve(qnt);
      if (qnt.iterations) cfg.experiment.iterations = *qnt.iterations;
      const RunOptions o = run_options(qnt);
      const QuantumMode m = parse_mode(mode);
      const QuantumResult r = compute_quantum(cfg, m, o);
      write_quantum(r, qnt.out);
      std::vector<std::filesystem::path> outs{qnt.out};
      if (!r.bins.empty()) outs.push_back(bins_path(qnt.out));
      write_manifest("quantum", cfg, qnt.out, outs, run_json(qnt, o, "\"mode\": \"" + to_string(m) + "\""));
    } else if (*analyze) {
      ScenarioConfig cfg = resolve(ana);
      if (ana.iterations) {
        if (*ana.iterations < 1) throw ConfigError("analyze needs --iterations >= 1");
        cfg.analyze_iterations = *ana.iterations;
      }
      const RunOptions o = run_options(ana);
      const auto r = compute_analysis(cfg, o);
      write_analysis(r, cfg.band_width, ana.out);
      std::filesystem::path mags = ana.out, mats = ana.out;
      mags += ".magnitudes.csv";
      mats += ".matrices.csv";
      write_manifest("analyze", cfg, ana.out, {ana.out, mags, mats}, run_json(ana, o));
    }
  } catch (const ConfigError& e) {
    std::cerr << "qsaw: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutputError& e) {
    std::cerr << "qsaw: output error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const NumericalError& e) {
    std::cerr << "qsaw: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qsaw: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qsaw: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
