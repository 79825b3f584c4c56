#pragma once

// Gate-level realization of the sawtooth map: QFT circuits and diagonal
// quadratic-phase operators built from z-rotations and controlled phases.
//
// Qubit q is bit q of the computational index (q = 0 is least significant).

#include "qsaw/linalg.hpp"
#include "qsaw/params.hpp"

#include <string>
#include <vector>

namespace qsaw {

enum class GateKind {
  RotationZ,        // diag(e^{-i a/2}, e^{+i a/2}) on q0
  ControlledPhase,  // diag(1, 1, 1, e^{i a}) on (q0, q1)
  GlobalPhase,      // e^{i a} times identity
  Hadamard,         // on q0
  Swap,             // exchanges q0 and q1
};

struct Gate {
  GateKind kind;
  int q0 = -1;
  int q1 = -1;
  double angle = 0.0;

  static Gate rz(int q, double a) { return {GateKind::RotationZ, q, -1, a}; }
  static Gate cphase(int c, int t, double a) { return {GateKind::ControlledPhase, c, t, a}; }
  static Gate global(double a) { return {GateKind::GlobalPhase, -1, -1, a}; }
  static Gate hadamard(int q) { return {GateKind::Hadamard, q, -1, 0.0}; }
  static Gate swap(int a, int b) { return {GateKind::Swap, a, b, 0.0}; }
};

using GateList = std::vector<Gate>;

std::string to_string(const Gate& g);

/// Full 2^n x 2^n matrix of one gate.
ComplexMatrix gate_matrix(const Gate& g, int n_qubits);

/// Product of the gates in application order: G_last ... G_first.
ComplexMatrix circuit_unitary(const GateList& gates, int n_qubits);

/// Reversed list with negated angles.
GateList inverse_circuit(const GateList& gates);

/// Diagonal phase a (idx - offset)^2 + b (idx - offset) + c over the
/// computational index.
struct QuadraticPhase {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double offset = 0.0;

  double at(std::size_t idx) const;
};

QuadraticPhase free_evolution_phase(const SawtoothParams& p);  // over momentum m = idx - N/2
QuadraticPhase kick_phase(const SawtoothParams& p);            // over position phi = 2 pi idx / N

/// Expands the phase in the index bits, idx = sum_i 2^i b_i, into one global
/// phase, one z-rotation per bit and one controlled phase per bit pair.
/// Angles are reduced modulo 2 pi and vanishing terms are not emitted.
GateList decompose_diagonal(const QuadraticPhase& phase, int n_qubits);

/// Hadamards and controlled phases followed by the bit-reversal swaps;
/// realizes build_qft exactly.
GateList qft_circuit(int n_qubits);

/// QFT, kick, inverse QFT and (optionally) free evolution, in that order.
GateList sawtooth_circuit(const SawtoothParams& p, bool include_final_free = true);

}  // namespace qsaw
