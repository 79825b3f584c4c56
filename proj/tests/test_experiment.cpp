#include "doctest.h"

#include "qsaw/experiment.hpp"
#include "qsaw/sawtooth.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qsaw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qsaw_test_experiment";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QSAW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream cells(line);
    std::string c;
    while (std::getline(cells, c, ',')) row.push_back(c);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("empty config gives the built-in defaults") {
    const ScenarioConfig c = parse_config("{}");
    CHECK(c.experiment.params.chaos() == 1.5);
    CHECK(c.experiment.params.winding() == 7);
    CHECK(c.experiment.params.levels() == 8);
    CHECK(c.experiment.durations.qft == 6e-3);
    CHECK(c.experiment.durations.free == 50e-3);
    CHECK(c.experiment.durations.kick == 20e-3);
    CHECK(c.experiment.rates.r1[0] == 1.0);
    CHECK(c.classical_trajectories == 20000);
    CHECK(c.experiment.rf.bins.size() == 1);
  }
  SUBCASE("shipped default config matches the built-in defaults") {
    const ScenarioConfig a = load_config(fs::path(QSAW_CONFIG_DIR) / "default.json");
    const ScenarioConfig b = parse_config("{}");
    CHECK(config_to_json(a) == config_to_json(b));
  }
  SUBCASE("overrides") {
    const ScenarioConfig c = parse_config(R"({"map": {"K": 2.0, "qubits": 4}, "seed": 7,
      "decoherence": {"enabled": false, "mode": "per_iteration", "r1": [1, 2, 3, 4], "r2": 2.5},
      "rf": {"bins": [[0.9, 0.5], [1.0, 0.5]]}, "analyze": {"band_width": 2}})");
    CHECK(c.experiment.params.levels() == 16);
    CHECK(c.experiment.hydrogen_qubit == 3);
    CHECK(c.experiment.seed == 7);
    CHECK_FALSE(c.experiment.decoherence);
    CHECK(c.experiment.relaxation_mode == RelaxationMode::PerIteration);
    CHECK(c.experiment.rates.r1[3] == 4.0);
    CHECK(c.experiment.rates.r2[3] == 2.5);
    CHECK(c.experiment.rf.bins.size() == 2);
    CHECK(c.band_width == 2);
  }
  SUBCASE("rf file resolves against the config directory") {
    const ScenarioConfig c = load_config(fs::path(QSAW_CONFIG_DIR) / "noisy_synthetic.json");
    CHECK(c.experiment.rf.bins.size() == 9);
    CHECK(c.per_bin);
  }
  SUBCASE("round trip through JSON") {
    const ScenarioConfig a = parse_config(R"({"map": {"K": 0.7}, "coherent": {"error_time": 1e-5}})");
    const ScenarioConfig b = parse_config(config_to_json(a));
    CHECK(config_to_json(a) == config_to_json(b));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map": {"k": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map": {"L": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"map": {"K": "x"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"decoherence": {"r1": [1, 2]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"decoherence": {"mode": "sometimes"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"decoherence": {"r1": 3, "r2": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"rf": {"bins": [[1.0, 0.5]]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"input": {"polarization": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"analyze": {"band_width": 8}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent.json"), ConfigError);
  }
}

TEST_CASE("classical scenario") {
  ScenarioConfig cfg = parse_config(R"({"classical": {"trajectories": 3000, "iterations": 10}})");
  const ClassicalResult r = compute_classical(cfg);
  REQUIRE(r.histograms.size() == 11);
  CHECK(r.histograms[0].at_momentum(0) == 1.0);
  const fs::path out = scratch("classical.csv");
  write_classical(r, out);
  const auto rows = read_csv(out);
  CHECK(rows[0].front() == "t");
  CHECK(rows[0][1] == "W_-4");
  CHECK(rows[0].back() == "second_moment");
  CHECK(rows.size() == 12);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double s = 0.0;
    for (std::size_t c = 1; c <= 8; ++c) s += std::stod(rows[i][c]);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
  const ClassicalResult threaded = compute_classical(cfg, RunOptions{3});
  for (std::size_t t = 0; t < r.histograms.size(); ++t) CHECK(threaded.histograms[t].values() == r.histograms[t].values());
}

TEST_CASE("quantum scenario") {
  ScenarioConfig cfg = parse_config(R"({"iterations": 5})");
  const QuantumResult ideal = compute_quantum(cfg, QuantumMode::Ideal);
  const QuantumResult circuit = compute_quantum(cfg, QuantumMode::Circuit);
  REQUIRE(ideal.ensemble.w.size() == 6);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(ideal.ensemble.w[t].at_index(i) - circuit.ensemble.w[t].at_index(i)) < 1e-9);

  cfg.experiment.rf = RfDistribution::synthetic_carbon();
  cfg.per_bin = true;
  const QuantumResult noisy = compute_quantum(cfg, QuantumMode::Noisy);
  CHECK(noisy.bins.size() == 9);
  const QuantumResult noisy_threads = compute_quantum(cfg, QuantumMode::Noisy, RunOptions{4});
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(noisy.ensemble.w[t].at_index(i) - noisy_threads.ensemble.w[t].at_index(i)) < 1e-12);

  const fs::path out = scratch("noisy.csv");
  write_quantum(noisy, out);
  const auto rows = read_csv(out);
  CHECK(rows[0].back() == "entropy_bits");
  CHECK(rows.size() == 7);
  const auto bins = read_csv(bins_path(out));
  CHECK(bins.size() == 1 + 9 * 6);
  CHECK(bins[0][0] == "bin");
  CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
}

TEST_CASE("analysis scenario") {
  const ScenarioConfig cfg = parse_config("{}");
  const auto r = compute_analysis(cfg);
  REQUIRE(r.size() == 10);
  CHECK(r[0].stack == ErrorStack::None);
  CHECK(r[0].kraus.size() == 1);
  CHECK(r[0].leading_bandedness.ratio == doctest::Approx(bandedness(build_sawtooth(cfg.experiment.params), 1).ratio));
  for (const auto& a : r) {
    CHECK(a.channel.is_trace_preserving(1e-8));
    for (std::size_t k = 1; k < a.kraus.size(); ++k) CHECK(a.kraus.magnitudes[k] <= a.kraus.magnitudes[k - 1]);
  }
  // The incoherent stacks fall back to the synthetic distribution.
  CHECK(stack_config(cfg, ErrorStack::All).rf.bins.size() == 9);
  CHECK(stack_config(cfg, ErrorStack::Coherent).rf.bins.size() == 1);
  CHECK_FALSE(stack_config(cfg, ErrorStack::Coherent).decoherence);
  CHECK(stack_config(cfg, ErrorStack::None).coherent.error_time == 0.0);
  CHECK(stack_config(cfg, ErrorStack::Coherent).coherent.error_time == cfg.analyze_coherent_error_time);

  const fs::path out = scratch("analysis.csv");
  write_analysis(r, 1, out);
  const auto rows = read_csv(out);
  CHECK(rows.size() == 11);
  CHECK(rows[1][0] == "none");
  fs::path mags = out;
  mags += ".magnitudes.csv";
  const auto m = read_csv(mags);
  CHECK(m[0] == std::vector<std::string>{"variant", "iterations", "k", "magnitude"});
}

TEST_CASE("manifest") {
  const ScenarioConfig cfg = parse_config(R"({"seed": 99})");
  const fs::path out = scratch("m.csv");
  write_manifest("classical", cfg, out, {out}, R"({"serial": true})");
  const auto j = nlohmann::json::parse(slurp(manifest_path(out)));
  CHECK(j["scenario"] == "classical");
  CHECK(j["seed"] == 99);
  CHECK(j["version"] == tool_version());
  CHECK(j["outputs"][0] == "m.csv");
  CHECK(j["config"]["map"]["K"] == 1.5);
  // The manifest's config reproduces the run configuration.
  CHECK(config_to_json(parse_config(j["config"].dump())) == config_to_json(cfg));
}

TEST_CASE("format_double keeps 17 digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(kPi)) == kPi);
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const std::string cfg = std::string(QSAW_CONFIG_DIR) + "/default.json";
  CHECK(run_cli("estimate") == 0);
  CHECK(run_cli("classical --serial --iterations 5 --out " + (dir / "c.csv").string()) == 0);
  CHECK(fs::exists(dir / "c.csv.manifest.json"));
  CHECK(run_cli("quantum --mode circuit --iterations 3 --config " + cfg + " --out " + (dir / "q.csv").string()) == 0);
  CHECK(run_cli("quantum --mode noisy --iterations 2 --rf-dist " + std::string(QSAW_CONFIG_DIR) +
                "/rf_carbon_synthetic.csv --out " + (dir / "n.csv").string()) == 0);
  CHECK(run_cli("analyze --iterations 1 --serial --out " + (dir / "a.csv").string()) == 0);
  CHECK(fs::exists(dir / "a.csv.matrices.csv"));

  SUBCASE("exit codes") {
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"map": {"L": -1}})";
    CHECK(run_cli("classical --config " + bad.string() + " --out " + (dir / "x.csv").string()) == kExitConfig);
    CHECK(run_cli("quantum --mode warp --out " + (dir / "x.csv").string()) == kExitConfig);
    CHECK(run_cli("frobnicate") == kExitConfig);
    CHECK(run_cli("classical --iterations 2 --out /proc/qsaw/forbidden.csv") == kExitOutput);
    CHECK(kExitNumerical != kExitConfig);
  }
  SUBCASE("seeds matter and repeat") {
    CHECK(run_cli("classical --serial --seed 5 --iterations 5 --out " + (dir / "s1.csv").string()) == 0);
    CHECK(run_cli("classical --serial --seed 5 --iterations 5 --out " + (dir / "s2.csv").string()) == 0);
    CHECK(run_cli("classical --serial --seed 6 --iterations 5 --out " + (dir / "s3.csv").string()) == 0);
    CHECK(slurp(dir / "s1.csv") == slurp(dir / "s2.csv"));
    CHECK(slurp(dir / "s1.csv") != slurp(dir / "s3.csv"));
  }
}
