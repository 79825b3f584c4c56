#include "qsaw/emulation.hpp"

#include "qsaw/circuit.hpp"
#include "qsaw/sawtooth.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qsaw {

// --- spin system -------------------------------------------------------------

void SpinSystem::validate() const {
  const auto n = static_cast<std::size_t>(n_qubits);
  if (n_qubits < 1) throw std::invalid_argument("spin system needs at least one qubit");
  if (offsets_hz.size() != n) throw std::invalid_argument("spin system: one offset per qubit required");
  if (couplings_hz.rows() != n_qubits || couplings_hz.cols() != n_qubits) {
    throw std::invalid_argument("spin system: coupling matrix must be n x n");
  }
  for (int j = 0; j < n_qubits; ++j) {
    if (couplings_hz(j, j) != 0.0) throw std::invalid_argument("spin system: self-coupling must be zero");
    for (int k = 0; k < n_qubits; ++k) {
      if (couplings_hz(j, k) != couplings_hz(k, j)) throw std::invalid_argument("spin system: couplings not symmetric");
    }
  }
}

SpinSystem acetylene_spin_system() {
  SpinSystem s;
  s.n_qubits = 3;
  s.offsets_hz = {-600.5, 600.5, 0.0};
  s.couplings_hz = Eigen::MatrixXd::Zero(3, 3);
  auto set = [&](int a, int b, double j) { s.couplings_hz(a, b) = s.couplings_hz(b, a) = j; };
  set(2, 1, 235.7);
  set(1, 0, 132.6);
  set(2, 0, 42.9);
  s.form = CouplingForm::Full;
  return s;
}

ComplexMatrix internal_hamiltonian(const SpinSystem& s) {
  s.validate();
  const int n = s.n_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const ComplexMatrix sx = single_pauli(Pauli::X), sy = single_pauli(Pauli::Y), sz = single_pauli(Pauli::Z);
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int q = 0; q < n; ++q) {
    h += kRadPerHz * (s.offsets_hz[static_cast<std::size_t>(q)] / 2.0) * embed_single(n, q, sz);
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double coupling = s.couplings_hz(j, k);
      if (coupling == 0.0) continue;
      ComplexMatrix term = embed_single(n, j, sz) * embed_single(n, k, sz);
      if (s.form == CouplingForm::Full) {
        term += embed_single(n, j, sx) * embed_single(n, k, sx) + embed_single(n, j, sy) * embed_single(n, k, sy);
      }
      h += kRadPerHz * (coupling / 4.0) * term;
    }
  }
  return h;
}

DensityState pseudopure_state(int n_qubits, std::size_t target, double polarization) {
  if (!(polarization > 0.0 && polarization <= 1.0)) {
    throw std::invalid_argument("pseudopure_state: polarization must lie in (0, 1]");
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (target >= static_cast<std::size_t>(dim)) throw std::invalid_argument("pseudopure_state: target out of range");
  ComplexMatrix rho = ComplexMatrix::Identity(dim, dim) * ((1.0 - polarization) / static_cast<double>(dim));
  rho(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(target)) += polarization;
  return DensityState(std::move(rho));
}

ComplexMatrix scale_gate(const ComplexMatrix& u, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("scale_gate: scale must be finite and >= 0");
  if (!is_unitary(u, 1e-10)) throw std::invalid_argument("scale_gate: matrix is not unitary");
  if (s == 1.0) return u;
  // A unitary is normal, so its complex Schur form is diagonal up to rounding
  // and the Schur vectors stay orthonormal even for degenerate eigenphases.
  Eigen::ComplexSchur<ComplexMatrix> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("scale_gate: Schur decomposition failed");
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& q = schur.matrixU();
  ComplexVector d(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    double phase = std::arg(t(k, k));
    // Eigenvalue -1 may come out at -pi + eps; fold it to +pi.
    if (phase <= -kPi + 1e-9) phase += 2.0 * kPi;
    d(k) = std::polar(1.0, s * phase);
  }
  return q * d.asDiagonal() * q.adjoint();
}

ComplexMatrix coherent_error_gate(const ComplexMatrix& u, const CoherentErrorSettings& settings) {
  if (!(settings.error_time >= 0.0)) throw std::invalid_argument("coherent error time must be >= 0");
  if (settings.error_time == 0.0) return u;
  const ComplexMatrix h = internal_hamiltonian(settings.system);
  if (h.rows() != u.rows()) throw std::invalid_argument("coherent_error_gate: spin system size mismatch");
  return hermitian_evolve(h, settings.error_time) * u;
}

double average_gate_fidelity(const ComplexMatrix& u_impl, const ComplexMatrix& u_target) {
  if (u_impl.rows() != u_target.rows() || u_impl.cols() != u_target.cols() || !is_square(u_impl)) {
    throw std::invalid_argument("average_gate_fidelity: dimension mismatch");
  }
  const double n = static_cast<double>(u_impl.rows());
  return std::norm((u_target.adjoint() * u_impl).trace()) / (n * n);
}

double state_correlation(const DensityState& a, const DensityState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("state_correlation: dimension mismatch");
  const double pa = (a.matrix() * a.matrix()).trace().real();
  const double pb = (b.matrix() * b.matrix()).trace().real();
  if (pa <= 0.0 || pb <= 0.0) throw std::invalid_argument("state_correlation: zero purity");
  return (a.matrix() * b.matrix()).trace().real() / std::sqrt(pa * pb);
}

// --- rf distributions ----------------------------------------------------------

void RfDistribution::validate() const {
  if (bins.empty()) throw std::invalid_argument("rf distribution has no bins");
  double total = 0.0;
  for (const auto& b : bins) {
    if (!(b.probability >= 0.0)) throw std::invalid_argument("rf distribution: negative probability");
    if (!(b.carbon > 0.0) || !(b.hydrogen > 0.0) || !std::isfinite(b.carbon) || !std::isfinite(b.hydrogen)) {
      throw std::invalid_argument("rf distribution: scales must be positive");
    }
    total += b.probability;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("rf distribution probabilities sum to " + std::to_string(total));
  }
}

std::size_t RfDistribution::nominal_bin() const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double d = std::abs(bins[i].carbon - 1.0) + std::abs(bins[i].hydrogen - 1.0);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

RfDistribution RfDistribution::delta() { return {{RfBin{1.0, 1.0, 1.0}}, false}; }

RfDistribution RfDistribution::synthetic_carbon() {
  const double scales[] = {0.72, 0.78, 0.84, 0.89, 0.94, 1.00, 1.03, 1.06, 1.09};
  const double probs[] = {0.02, 0.03, 0.05, 0.08, 0.14, 0.30, 0.20, 0.12, 0.06};
  RfDistribution d;
  for (int i = 0; i < 9; ++i) d.bins.push_back({scales[i], scales[i], probs[i]});
  return d;
}

RfDistribution parse_rf_distribution(const std::string& text) {
  RfDistribution d;
  std::optional<std::size_t> columns;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace_if(line.begin(), line.end(), [](char c) { return c == ',' || c == ';' || c == '\t'; }, ' ');
    std::istringstream fields(line);
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        // A non-numeric line before any data is a header.
        if (d.bins.empty() && !columns) {
          values.clear();
          break;
        }
        throw std::invalid_argument("rf distribution line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
      values.push_back(v);
    }
    if (values.empty()) continue;
    if (values.size() != 2 && values.size() != 3) {
      throw std::invalid_argument("rf distribution line " + std::to_string(lineno) + ": expected 2 or 3 columns");
    }
    if (columns && *columns != values.size()) {
      throw std::invalid_argument("rf distribution line " + std::to_string(lineno) + ": inconsistent column count");
    }
    columns = values.size();
    if (values.size() == 2) {
      d.bins.push_back({values[0], values[0], values[1]});
    } else {
      d.bins.push_back({values[0], values[1], values[2]});
    }
  }
  d.joint = columns && *columns == 3;
  d.validate();
  return d;
}

RfDistribution load_rf_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rf distribution file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rf_distribution(buf.str());
}

// --- experiment assembly -------------------------------------------------------

void ExperimentConfig::validate() const {
  const GateDurations& d = durations;
  for (double t : {d.qft, d.qft_inverse, d.free, d.kick, d.preparation}) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("gate durations must be finite and >= 0");
  }
  if (!(polarization > 0.0 && polarization <= 1.0)) throw std::invalid_argument("polarization must lie in (0, 1]");
  if (rates.n_qubits() != params.n_qubits()) throw std::invalid_argument("relaxation rates need one entry per qubit");
  rates.validate();
  rf.validate();
  if (iterations < 0) throw std::invalid_argument("iteration count must be >= 0");
  if (hydrogen_qubit < 0 || hydrogen_qubit >= params.n_qubits()) {
    throw std::invalid_argument("hydrogen qubit out of range");
  }
  if (!(coherent.error_time >= 0.0)) throw std::invalid_argument("coherent error time must be >= 0");
  if (coherent.error_time > 0.0 && coherent.system.n_qubits != params.n_qubits()) {
    throw std::invalid_argument("spin system size does not match the register");
  }
}

namespace {

struct Step {
  ComplexMatrix ideal;
  GateList circuit;
  double duration;
};

double elementary_scale(const Gate& g, const RfBin& scales, int hydrogen_qubit) {
  const auto species = [&](int q) { return q == hydrogen_qubit ? scales.hydrogen : scales.carbon; };
  switch (g.kind) {
    case GateKind::GlobalPhase:
    case GateKind::Swap:
      return 1.0;
    case GateKind::RotationZ:
    case GateKind::Hadamard:
      return species(g.q0);
    case GateKind::ControlledPhase:
      return 0.5 * (species(g.q0) + species(g.q1));
  }
  return 1.0;
}

ComplexMatrix scaled_step(const Step& step, const ExperimentConfig& cfg, const RfBin& scales) {
  if (!cfg.rf.joint) return scale_gate(step.ideal, scales.carbon);
  const int n = cfg.params.n_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const Gate& g : step.circuit) {
    u = scale_gate(gate_matrix(g, n), elementary_scale(g, scales, cfg.hydrogen_qubit)) * u;
  }
  return u;
}

}  // namespace

Superoperator build_iteration_channel(const ExperimentConfig& cfg, const RfBin& scales, bool final_iteration) {
  cfg.validate();
  const SawtoothParams& p = cfg.params;
  const int n = p.n_qubits();
  const ComplexMatrix f = build_qft(p.levels());

  std::vector<Step> steps;
  steps.push_back({f, qft_circuit(n), cfg.durations.qft});
  steps.push_back({build_kick(p), decompose_diagonal(kick_phase(p), n), cfg.durations.kick});
  steps.push_back({f.adjoint(), inverse_circuit(qft_circuit(n)), cfg.durations.qft_inverse});
  if (!final_iteration) {
    steps.push_back({build_free_evolution(p), decompose_diagonal(free_evolution_phase(p), n), cfg.durations.free});
  }

  Superoperator total = Superoperator::identity(p.levels());
  double elapsed = 0.0;
  for (const Step& step : steps) {
    const ComplexMatrix u = coherent_error_gate(scaled_step(step, cfg, scales), cfg.coherent);
    total = compose(unitary_to_superop(u), total);
    if (cfg.decoherence && cfg.relaxation_mode == RelaxationMode::PerGate) {
      total = compose(relaxation_superop(cfg.rates, step.duration), total);
    }
    elapsed += step.duration;
  }
  if (cfg.decoherence && cfg.relaxation_mode == RelaxationMode::PerIteration) {
    total = compose(relaxation_superop(cfg.rates, elapsed), total);
  }
  return total;
}

Superoperator ensemble_channel(const ExperimentConfig& cfg, bool final_iteration, unsigned threads) {
  cfg.validate();
  const auto& bins = cfg.rf.bins;
  std::vector<std::optional<Superoperator>> built(bins.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) built[i] = build_iteration_channel(cfg, bins[i], final_iteration);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(bins.size())));
  if (workers == 1) {
    work(0, bins.size());
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work, bins.size() * w / workers, bins.size() * (w + 1) / workers);
    }
    for (auto& t : pool) t.join();
  }
  std::vector<WeightedChannel> weighted;
  weighted.reserve(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) weighted.push_back({std::move(*built[i]), bins[i].probability});
  return mix(weighted);
}

DensityState prepared_input(const ExperimentConfig& cfg) {
  cfg.validate();
  DensityState rho = pseudopure_state(cfg.params.n_qubits(), cfg.input_index(), cfg.polarization);
  if (cfg.decoherence && cfg.durations.preparation > 0.0) {
    rho = relaxation_superop(cfg.rates, cfg.durations.preparation).apply(rho);
  }
  return rho;
}

std::vector<DensityState> channel_series(const DensityState& rho0, const Superoperator& full,
                                         const Superoperator& last, int iterations) {
  if (iterations < 0) throw std::invalid_argument("channel_series: negative iteration count");
  if (full.dim() != rho0.dim() || last.dim() != rho0.dim()) throw std::invalid_argument("channel_series: dimension mismatch");
  std::vector<DensityState> out{rho0};
  ComplexMatrix rho = rho0.matrix();
  for (int t = 1; t <= iterations; ++t) {
    out.push_back(DensityState(last.apply(rho)));
    rho = full.apply(rho);
  }
  return out;
}

}  // namespace qsaw
