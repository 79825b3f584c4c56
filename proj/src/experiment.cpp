#include "qsaw/experiment.hpp"

#include "qsaw/circuit.hpp"
#include "qsaw/sawtooth.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#ifndef QSAW_VERSION
#define QSAW_VERSION "dev"
#endif

namespace qsaw {

using nlohmann::json;

std::string tool_version() { return QSAW_VERSION; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- configuration -------------------------------------------------------------

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<double> per_qubit(const json& v, int n, const char* key) {
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(n), v.get<double>());
  if (v.is_array() && v.size() == static_cast<std::size_t>(n)) return v.get<std::vector<double>>();
  throw ConfigError(std::string("'") + key + "' must be a number or one value per qubit");
}

RelaxationMode parse_relaxation_mode(const std::string& s) {
  if (s == "per_gate") return RelaxationMode::PerGate;
  if (s == "per_iteration") return RelaxationMode::PerIteration;
  throw ConfigError("relaxation mode must be per_gate or per_iteration, got '" + s + "'");
}

std::string relaxation_mode_name(RelaxationMode m) {
  return m == RelaxationMode::PerGate ? "per_gate" : "per_iteration";
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (root.is_null()) root = json::object();
  allow_keys(root, "config", {"map", "seed", "iterations", "classical", "durations", "decoherence", "rf",
                              "coherent", "spin_system", "input", "hydrogen_qubit", "quantum", "analyze"});
  ScenarioConfig cfg;
  ExperimentConfig& ex = cfg.experiment;
  try {
    double k = 1.5;
    int l = 7;
    int nq = 3;
    if (root.contains("map")) {
      const json& m = root["map"];
      allow_keys(m, "map", {"K", "L", "qubits"});
      read(m, "K", k);
      read(m, "L", l);
      read(m, "qubits", nq);
    }
    ex.params = SawtoothParams(k, l, nq);
    ex.rates = RelaxationRates::uniform(nq, 1.0, 1.0);
    ex.hydrogen_qubit = nq - 1;
    ex.iterations = 40;
    read(root, "seed", ex.seed);
    read(root, "iterations", ex.iterations);
    read(root, "hydrogen_qubit", ex.hydrogen_qubit);

    if (root.contains("classical")) {
      const json& c = root["classical"];
      allow_keys(c, "classical", {"trajectories", "iterations"});
      read(c, "trajectories", cfg.classical_trajectories);
      read(c, "iterations", cfg.classical_iterations);
    }
    if (root.contains("durations")) {
      const json& d = root["durations"];
      allow_keys(d, "durations", {"qft", "qft_inverse", "free", "kick", "preparation"});
      read(d, "qft", ex.durations.qft);
      read(d, "qft_inverse", ex.durations.qft_inverse);
      read(d, "free", ex.durations.free);
      read(d, "kick", ex.durations.kick);
      read(d, "preparation", ex.durations.preparation);
    }
    if (root.contains("decoherence")) {
      const json& d = root["decoherence"];
      allow_keys(d, "decoherence", {"enabled", "mode", "r1", "r2"});
      read(d, "enabled", ex.decoherence);
      if (d.contains("mode")) ex.relaxation_mode = parse_relaxation_mode(d["mode"].get<std::string>());
      if (d.contains("r1")) ex.rates.r1 = per_qubit(d["r1"], nq, "r1");
      if (d.contains("r2")) ex.rates.r2 = per_qubit(d["r2"], nq, "r2");
    }
    if (root.contains("rf")) {
      const json& r = root["rf"];
      allow_keys(r, "rf", {"file", "bins"});
      if (r.contains("file") && r.contains("bins")) throw ConfigError("rf: give either 'file' or 'bins', not both");
      if (r.contains("file")) {
        std::filesystem::path p = r["file"].get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        ex.rf = load_rf_distribution(p);
        cfg.rf_source = p.filename().string();
      } else if (r.contains("bins")) {
        std::ostringstream rows;
        for (const auto& b : r["bins"]) {
          for (std::size_t i = 0; i < b.size(); ++i) rows << (i ? "," : "") << format_double(b[i].get<double>());
          rows << "\n";
        }
        ex.rf = parse_rf_distribution(rows.str());
        cfg.rf_source = "inline";
      }
    }
    if (root.contains("coherent")) {
      const json& c = root["coherent"];
      allow_keys(c, "coherent", {"error_time"});
      read(c, "error_time", ex.coherent.error_time);
    }
    if (root.contains("spin_system")) {
      const json& s = root["spin_system"];
      allow_keys(s, "spin_system", {"offsets_hz", "couplings_hz", "form"});
      SpinSystem sys = ex.coherent.system;
      read(s, "offsets_hz", sys.offsets_hz);
      sys.n_qubits = static_cast<int>(sys.offsets_hz.size());
      if (s.contains("couplings_hz")) {
        const auto rows = s["couplings_hz"].get<std::vector<std::vector<double>>>();
        sys.couplings_hz = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                 static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != rows.size()) throw ConfigError("spin_system.couplings_hz must be square");
          for (std::size_t j = 0; j < rows.size(); ++j) {
            sys.couplings_hz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
          }
        }
      }
      if (s.contains("form")) {
        const auto f = s["form"].get<std::string>();
        if (f == "weak") sys.form = CouplingForm::Weak;
        else if (f == "full") sys.form = CouplingForm::Full;
        else throw ConfigError("spin_system.form must be weak or full");
      }
      sys.validate();
      ex.coherent.system = sys;
    }
    if (root.contains("input")) {
      const json& i = root["input"];
      allow_keys(i, "input", {"polarization"});
      read(i, "polarization", ex.polarization);
    }
    if (root.contains("quantum")) {
      const json& q = root["quantum"];
      allow_keys(q, "quantum", {"per_bin"});
      read(q, "per_bin", cfg.per_bin);
    }
    if (root.contains("analyze")) {
      const json& a = root["analyze"];
      allow_keys(a, "analyze", {"iterations", "band_width", "coherent_error_time"});
      read(a, "iterations", cfg.analyze_iterations);
      read(a, "band_width", cfg.band_width);
      read(a, "coherent_error_time", cfg.analyze_coherent_error_time);
    }
    ex.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.classical_trajectories == 0) throw ConfigError("classical.trajectories must be >= 1");
  if (cfg.classical_iterations < 0) throw ConfigError("classical.iterations must be >= 0");
  if (cfg.analyze_iterations < 1) throw ConfigError("analyze.iterations must be >= 1");
  if (cfg.band_width < 0 || static_cast<std::size_t>(cfg.band_width) >= ex.params.levels()) {
    throw ConfigError("analyze.band_width must lie in [0, N)");
  }
  if (!(cfg.analyze_coherent_error_time >= 0.0)) throw ConfigError("analyze.coherent_error_time must be >= 0");
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

namespace {

json config_json(const ScenarioConfig& cfg) {
  const ExperimentConfig& ex = cfg.experiment;
  json bins = json::array();
  for (const auto& b : ex.rf.bins) {
    bins.push_back(ex.rf.joint ? json::array({b.carbon, b.hydrogen, b.probability}) : json::array({b.carbon, b.probability}));
  }
  json couplings = json::array();
  const auto& sys = ex.coherent.system;
  for (Eigen::Index i = 0; i < sys.couplings_hz.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < sys.couplings_hz.cols(); ++j) row.push_back(sys.couplings_hz(i, j));
    couplings.push_back(row);
  }
  return json{
      {"map", {{"K", ex.params.chaos()}, {"L", ex.params.winding()}, {"qubits", ex.params.n_qubits()}}},
      {"seed", ex.seed},
      {"iterations", ex.iterations},
      {"classical", {{"trajectories", cfg.classical_trajectories}, {"iterations", cfg.classical_iterations}}},
      {"durations",
       {{"qft", ex.durations.qft},
        {"qft_inverse", ex.durations.qft_inverse},
        {"free", ex.durations.free},
        {"kick", ex.durations.kick},
        {"preparation", ex.durations.preparation}}},
      {"decoherence",
       {{"enabled", ex.decoherence},
        {"mode", relaxation_mode_name(ex.relaxation_mode)},
        {"r1", ex.rates.r1},
        {"r2", ex.rates.r2}}},
      {"rf", {{"bins", bins}}},
      {"coherent", {{"error_time", ex.coherent.error_time}}},
      {"spin_system",
       {{"offsets_hz", sys.offsets_hz},
        {"couplings_hz", couplings},
        {"form", sys.form == CouplingForm::Full ? "full" : "weak"}}},
      {"input", {{"polarization", ex.polarization}}},
      {"hydrogen_qubit", ex.hydrogen_qubit},
      {"quantum", {{"per_bin", cfg.per_bin}}},
      {"analyze",
       {{"iterations", cfg.analyze_iterations},
        {"band_width", cfg.band_width},
        {"coherent_error_time", cfg.analyze_coherent_error_time}}},
  };
}

std::ofstream open_output(const std::filesystem::path& out) {
  if (out.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot write " + out.string());
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& out) {
  f.flush();
  if (!f) throw OutputError("write failed for " + out.string());
}

std::string w_header(std::size_t n) {
  std::string h;
  const int half = static_cast<int>(n / 2);
  for (int m = -half; m < half; ++m) h += ",W_" + std::to_string(m);
  return h;
}

std::string w_row(const MomentumDistribution& w) {
  std::string s;
  for (double v : w.values()) s += "," + format_double(v);
  return s;
}

}  // namespace

std::string config_to_json(const ScenarioConfig& cfg) { return config_json(cfg).dump(2); }

// --- classical -------------------------------------------------------------------

ClassicalResult compute_classical(const ScenarioConfig& cfg, const RunOptions& opts) {
  ClassicalResult r;
  r.histograms = classical_ensemble(cfg.experiment.params, cfg.classical_trajectories, cfg.classical_iterations,
                                    cfg.experiment.seed, opts.threads);
  for (const auto& h : r.histograms) r.second_moments.push_back(second_moment(h));
  return r;
}

void write_classical(const ClassicalResult& r, const std::filesystem::path& out) {
  std::ofstream f = open_output(out);
  f << "t" << w_header(r.histograms.front().size()) << ",second_moment\n";
  for (std::size_t t = 0; t < r.histograms.size(); ++t) {
    f << t << w_row(r.histograms[t]) << "," << format_double(r.second_moments[t]) << "\n";
  }
  finish(f, out);
}

// --- quantum -----------------------------------------------------------------------

QuantumMode parse_mode(const std::string& s) {
  if (s == "ideal") return QuantumMode::Ideal;
  if (s == "circuit") return QuantumMode::Circuit;
  if (s == "noisy") return QuantumMode::Noisy;
  throw ConfigError("mode must be ideal, circuit or noisy, got '" + s + "'");
}

std::string to_string(QuantumMode m) {
  switch (m) {
    case QuantumMode::Ideal: return "ideal";
    case QuantumMode::Circuit: return "circuit";
    case QuantumMode::Noisy: return "noisy";
  }
  return "?";
}

SeriesDiagnostics diagnose(const std::vector<DensityState>& states) {
  SeriesDiagnostics d;
  for (const auto& rho : states) {
    d.w.push_back(momentum_distribution(rho));
    d.fwhm.push_back(fwhm(d.w.back()));
    d.second_moment.push_back(second_moment(d.w.back()));
    d.baseline.push_back(baseline_offset(d.w.back()));
    d.entropy.push_back(von_neumann_entropy(rho));
  }
  return d;
}

namespace {

std::vector<DensityState> unitary_series(const DensityState& rho0, const ComplexMatrix& u, int iterations) {
  std::vector<DensityState> out{rho0};
  ComplexMatrix rho = rho0.matrix();
  for (int t = 1; t <= iterations; ++t) {
    rho = u * rho * u.adjoint();
    out.emplace_back(rho);
  }
  return out;
}

}  // namespace

QuantumResult compute_quantum(const ScenarioConfig& cfg, QuantumMode mode, const RunOptions& opts) {
  const ExperimentConfig& ex = cfg.experiment;
  ex.validate();
  QuantumResult r{mode, {}, {}};
  const int n = ex.params.n_qubits();
  switch (mode) {
    case QuantumMode::Ideal:
    case QuantumMode::Circuit: {
      const ComplexMatrix u = mode == QuantumMode::Ideal ? build_sawtooth(ex.params)
                                                         : circuit_unitary(sawtooth_circuit(ex.params), n);
      const DensityState rho0 = pseudopure_state(n, ex.input_index(), ex.polarization);
      r.ensemble = diagnose(unitary_series(rho0, u, ex.iterations));
      break;
    }
    case QuantumMode::Noisy: {
      const DensityState rho0 = prepared_input(ex);
      const Superoperator full = ensemble_channel(ex, false, opts.threads);
      const Superoperator last = ensemble_channel(ex, true, opts.threads);
      if (!full.is_trace_preserving(1e-8) || !last.is_trace_preserving(1e-8)) {
        throw NumericalError("noisy iteration channel is not trace preserving");
      }
      r.ensemble = diagnose(channel_series(rho0, full, last, ex.iterations));
      if (cfg.per_bin) {
        for (const RfBin& bin : ex.rf.bins) {
          const Superoperator bf = build_iteration_channel(ex, bin, false);
          const Superoperator bl = build_iteration_channel(ex, bin, true);
          r.bins.push_back({bin, diagnose(channel_series(rho0, bf, bl, ex.iterations))});
        }
      }
      break;
    }
  }
  return r;
}

std::filesystem::path bins_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p += ".bins.csv";
  return p;
}

void write_quantum(const QuantumResult& r, const std::filesystem::path& out) {
  const std::string tail = ",fwhm,second_moment,baseline,entropy_bits\n";
  auto row = [](const SeriesDiagnostics& s, std::size_t t) {
    return w_row(s.w[t]) + "," + format_double(s.fwhm[t]) + "," + format_double(s.second_moment[t]) + "," +
           format_double(s.baseline[t]) + "," + format_double(s.entropy[t]) + "\n";
  };
  {
    std::ofstream f = open_output(out);
    f << "t" << w_header(r.ensemble.w.front().size()) << tail;
    for (std::size_t t = 0; t < r.ensemble.w.size(); ++t) f << t << row(r.ensemble, t);
    finish(f, out);
  }
  if (!r.bins.empty()) {
    const auto path = bins_path(out);
    std::ofstream f = open_output(path);
    f << "bin,scale_carbon,scale_hydrogen,probability,t" << w_header(r.ensemble.w.front().size()) << tail;
    for (std::size_t b = 0; b < r.bins.size(); ++b) {
      const auto& bs = r.bins[b];
      for (std::size_t t = 0; t < bs.series.w.size(); ++t) {
        f << b + 1 << "," << format_double(bs.bin.carbon) << "," << format_double(bs.bin.hydrogen) << ","
          << format_double(bs.bin.probability) << "," << t << row(bs.series, t);
      }
    }
    finish(f, path);
  }
}

// --- channel analysis ------------------------------------------------------------------

std::string to_string(ErrorStack s) {
  switch (s) {
    case ErrorStack::None: return "none";
    case ErrorStack::Coherent: return "coherent";
    case ErrorStack::CoherentDecoherent: return "coherent+decoherent";
    case ErrorStack::CoherentIncoherent: return "coherent+incoherent";
    case ErrorStack::All: return "all";
  }
  return "?";
}

ExperimentConfig stack_config(const ScenarioConfig& cfg, ErrorStack stack) {
  ExperimentConfig ex = cfg.experiment;
  const bool coherent = stack != ErrorStack::None;
  const bool decoherent = stack == ErrorStack::CoherentDecoherent || stack == ErrorStack::All;
  const bool incoherent = stack == ErrorStack::CoherentIncoherent || stack == ErrorStack::All;
  if (coherent) {
    if (ex.coherent.error_time == 0.0) ex.coherent.error_time = cfg.analyze_coherent_error_time;
  } else {
    ex.coherent.error_time = 0.0;
  }
  ex.decoherence = decoherent;
  if (!incoherent) {
    ex.rf = RfDistribution::delta();
  } else if (ex.rf.bins.size() < 2) {
    ex.rf = RfDistribution::synthetic_carbon();
  }
  return ex;
}

std::vector<ChannelAnalysis> compute_analysis(const ScenarioConfig& cfg, const RunOptions& opts) {
  std::vector<ChannelAnalysis> out;
  for (ErrorStack stack : kAllStacks) {
    const ExperimentConfig ex = stack_config(cfg, stack);
    const Superoperator one = ensemble_channel(ex, false, opts.threads);
    Superoperator acc = one;
    for (int t = 1; t <= cfg.analyze_iterations; ++t) {
      if (t > 1) acc = compose(one, acc);
      KrausSet k = kraus_decompose(acc);
      const Bandedness b = bandedness(k.operators.front(), cfg.band_width);
      out.push_back({stack, t, acc, std::move(k), b});
    }
  }
  return out;
}

void write_analysis(const std::vector<ChannelAnalysis>& r, int band_width, const std::filesystem::path& out) {
  auto sibling = [&](const char* suffix) {
    std::filesystem::path p = out;
    p += suffix;
    return p;
  };
  {
    std::ofstream f = open_output(out);
    f << "variant,iterations,kraus_count,leading_magnitude,band_width,leading_bandedness,trace_preserving\n";
    for (const auto& a : r) {
      f << to_string(a.stack) << "," << a.iterations << "," << a.kraus.size() << ","
        << format_double(a.kraus.magnitudes.front()) << "," << band_width << ","
        << format_double(a.leading_bandedness.ratio) << "," << (a.channel.is_trace_preserving(1e-8) ? 1 : 0) << "\n";
    }
    finish(f, out);
  }
  {
    const auto path = sibling(".magnitudes.csv");
    std::ofstream f = open_output(path);
    f << "variant,iterations,k,magnitude\n";
    for (const auto& a : r) {
      for (std::size_t k = 0; k < a.kraus.size(); ++k) {
        f << to_string(a.stack) << "," << a.iterations << "," << k << "," << format_double(a.kraus.magnitudes[k])
          << "\n";
      }
    }
    finish(f, path);
  }
  {
    const auto path = sibling(".matrices.csv");
    std::ofstream f = open_output(path);
    f << "variant,iterations,object,row,col,abs\n";
    for (const auto& a : r) {
      const std::string prefix = to_string(a.stack) + "," + std::to_string(a.iterations) + ",";
      const ComplexMatrix& s = a.channel.matrix();
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j)
          f << prefix << "superoperator," << i << "," << j << "," << format_double(std::abs(s(i, j))) << "\n";
      const ComplexMatrix& k = a.kraus.operators.front();
      for (Eigen::Index i = 0; i < k.rows(); ++i)
        for (Eigen::Index j = 0; j < k.cols(); ++j)
          f << prefix << "leading_kraus," << i << "," << j << "," << format_double(std::abs(k(i, j))) << "\n";
    }
    finish(f, path);
  }
}

// --- manifest ----------------------------------------------------------------------

std::filesystem::path manifest_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p += ".manifest.json";
  return p;
}

void write_manifest(const std::string& scenario, const ScenarioConfig& cfg, const std::filesystem::path& out,
                    const std::vector<std::filesystem::path>& outputs, const std::string& extra_json) {
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  json m{{"scenario", scenario},
         {"tool", "qsaw"},
         {"version", tool_version()},
         {"seed", cfg.experiment.seed},
         {"rf_source", cfg.rf_source},
         {"config", config_json(cfg)},
         {"outputs", files},
         {"run", json::parse(extra_json)}};
  const auto path = manifest_path(out);
  std::ofstream f = open_output(path);
  f << m.dump(2) << "\n";
  finish(f, path);
}

}  // namespace qsaw
