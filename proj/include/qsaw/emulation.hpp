#pragma once

// Noisy emulation of the three-qubit experiment: spin Hamiltonian, pseudopure
// input, gate-level coherent errors, per-gate relaxation and rf-inhomogeneity
// ensembles.

#include "qsaw/channels.hpp"
#include "qsaw/linalg.hpp"
#include "qsaw/params.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qsaw {

// Frequencies are quoted in Hz and Hamiltonians returned in rad/s, using
// spin-1/2 operators I = sigma / 2:
//   H = 2 pi [ sum_i nu_i I_z^i + sum_{j<k} J_jk I^j . I^k ]
// so a Zeeman term contributes pi nu sigma_z and a coupling (pi J / 2) sigma.sigma.
inline constexpr double kRadPerHz = 2.0 * kPi;

enum class CouplingForm {
  Weak,  // J I_z I_z
  Full,  // J I . I
};

struct SpinSystem {
  int n_qubits = 0;
  std::vector<double> offsets_hz;  // by bit position
  Eigen::MatrixXd couplings_hz;    // symmetric, zero diagonal
  CouplingForm form = CouplingForm::Full;

  void validate() const;
};

/// Three-qubit acetylene system: hydrogen on the most significant bit (bit 2,
/// on resonance), carbons on bits 1 and 0 at +-600.5 Hz (1.201 kHz apart);
/// J(H, C_bit1) = 235.7 Hz, J(C_bit1, C_bit0) = 132.6 Hz, J(H, C_bit0) = 42.9 Hz.
SpinSystem acetylene_spin_system();

ComplexMatrix internal_hamiltonian(const SpinSystem& s);

/// (1 - eps) I / N + eps |target><target|.
DensityState pseudopure_state(int n_qubits, std::size_t target, double polarization);

/// U^s on the principal branch: eigenphases taken in (-pi, pi] from the
/// Schur form, then scaled by s.
ComplexMatrix scale_gate(const ComplexMatrix& u, double s);

struct CoherentErrorSettings {
  double error_time = 0.0;  // seconds of free internal evolution after each gate
  SpinSystem system = acetylene_spin_system();
};

/// exp(-i H_int tau_err) U.
ComplexMatrix coherent_error_gate(const ComplexMatrix& u, const CoherentErrorSettings& settings);

/// |Tr(U_target^dagger U_impl)|^2 / N^2.
double average_gate_fidelity(const ComplexMatrix& u_impl, const ComplexMatrix& u_target);

/// Tr(a b) / sqrt(Tr a^2 Tr b^2).
double state_correlation(const DensityState& a, const DensityState& b);

// --- rf inhomogeneity --------------------------------------------------------

struct RfBin {
  double carbon = 1.0;    // multiple of the nominal carbon rf power
  double hydrogen = 1.0;  // equals `carbon` for one-channel distributions
  double probability = 1.0;
};

struct RfDistribution {
  std::vector<RfBin> bins;
  bool joint = false;

  void validate() const;
  std::size_t nominal_bin() const;  // bin whose scales are closest to 1

  static RfDistribution delta();
  /// Nine-bin Gaussian-like carbon distribution with a mean slightly below 1.
  /// Synthetic: it mimics the shape of a measured rf profile and carries no
  /// measured values.
  static RfDistribution synthetic_carbon();
};

/// Reads `scale,probability` (one channel) or `scale_c,scale_h,probability`
/// (joint) rows. Commas, whitespace or semicolons separate fields; `#` starts
/// a comment; probabilities are validated after loading.
RfDistribution load_rf_distribution(const std::filesystem::path& path);
RfDistribution parse_rf_distribution(const std::string& text);

// --- experiment assembly -----------------------------------------------------

struct GateDurations {
  double qft = 6e-3;
  double qft_inverse = 6e-3;
  double free = 50e-3;  // U_m
  double kick = 20e-3;  // U_phi
  double preparation = 50e-3;
};

enum class RelaxationMode {
  PerGate,       // one relaxation factor after each gate, for its duration
  PerIteration,  // one factor per iteration for the summed duration
};

struct ExperimentConfig {
  SawtoothParams params = default_params();
  GateDurations durations;
  RelaxationRates rates = RelaxationRates::uniform(3, 1.0, 1.0);
  bool decoherence = true;
  RelaxationMode relaxation_mode = RelaxationMode::PerGate;
  RfDistribution rf = RfDistribution::delta();
  CoherentErrorSettings coherent;
  double polarization = 1.0;
  int hydrogen_qubit = 2;  // bit driven by the hydrogen rf channel in joint mode
  int iterations = 3;
  std::uint64_t seed = 20070101;

  void validate() const;
  std::size_t input_index() const { return params.levels() / 2; }  // m = 0
};

/// One map iteration as a channel: QFT, kick, inverse QFT and free evolution,
/// each gate rf-scaled, followed by its coherent error and its relaxation.
/// `final_iteration` drops the free evolution and its relaxation.
///
/// One-channel distributions scale each whole gate unitary by the carbon
/// factor. Joint distributions scale every elementary gate of the gate's
/// circuit by the factor of the channel driving its qubits (the mean of the
/// two when a gate spans both species).
Superoperator build_iteration_channel(const ExperimentConfig& cfg, const RfBin& scales,
                                      bool final_iteration = false);

/// Probability-weighted mixture of build_iteration_channel over all bins.
/// Bins are built on up to `threads` workers and summed in bin order.
Superoperator ensemble_channel(const ExperimentConfig& cfg, bool final_iteration = false,
                               unsigned threads = 1);

/// Pseudopure input followed by relaxation over the preparation time when
/// decoherence is enabled.
DensityState prepared_input(const ExperimentConfig& cfg);

/// States after 0..iterations applications. Iteration t applies `full` t - 1
/// times and then `last`, so each state is what a readout after exactly t
/// iterations would see.
std::vector<DensityState> channel_series(const DensityState& rho0, const Superoperator& full,
                                         const Superoperator& last, int iterations);

}  // namespace qsaw
