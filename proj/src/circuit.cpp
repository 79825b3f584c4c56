#include "qsaw/circuit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsaw {

namespace {

constexpr double kNegligibleAngle = 1e-14;

double reduce_angle(double a) { return std::remainder(a, 2.0 * kPi); }

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) throw std::invalid_argument("gate qubit index out of range");
}

}  // namespace

std::string to_string(const Gate& g) {
  std::ostringstream os;
  switch (g.kind) {
    case GateKind::RotationZ: os << "rz(q" << g.q0 << ", " << g.angle << ")"; break;
    case GateKind::ControlledPhase: os << "cphase(q" << g.q0 << ", q" << g.q1 << ", " << g.angle << ")"; break;
    case GateKind::GlobalPhase: os << "global(" << g.angle << ")"; break;
    case GateKind::Hadamard: os << "h(q" << g.q0 << ")"; break;
    case GateKind::Swap: os << "swap(q" << g.q0 << ", q" << g.q1 << ")"; break;
  }
  return os.str();
}

ComplexMatrix gate_matrix(const Gate& g, int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  switch (g.kind) {
    case GateKind::GlobalPhase:
      return std::polar(1.0, g.angle) * ComplexMatrix::Identity(dim, dim);
    case GateKind::RotationZ: {
      check_qubit(g.q0, n_qubits);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool bit = (i >> g.q0) & 1;
        u(i, i) = std::polar(1.0, bit ? g.angle / 2.0 : -g.angle / 2.0);
      }
      return u;
    }
    case GateKind::ControlledPhase: {
      check_qubit(g.q0, n_qubits);
      check_qubit(g.q1, n_qubits);
      if (g.q0 == g.q1) throw std::invalid_argument("controlled phase needs two distinct qubits");
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool both = ((i >> g.q0) & 1) && ((i >> g.q1) & 1);
        u(i, i) = both ? std::polar(1.0, g.angle) : Complex(1.0);
      }
      return u;
    }
    case GateKind::Hadamard: {
      check_qubit(g.q0, n_qubits);
      const double r = 1.0 / std::sqrt(2.0);
      const Eigen::Index mask = Eigen::Index{1} << g.q0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool bit = i & mask;
        u(i & ~mask, i) = r;
        u(i | mask, i) = bit ? -r : r;
      }
      return u;
    }
    case GateKind::Swap: {
      check_qubit(g.q0, n_qubits);
      check_qubit(g.q1, n_qubits);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const Eigen::Index b0 = (i >> g.q0) & 1;
        const Eigen::Index b1 = (i >> g.q1) & 1;
        Eigen::Index j = i & ~((Eigen::Index{1} << g.q0) | (Eigen::Index{1} << g.q1));
        j |= (b1 << g.q0) | (b0 << g.q1);
        u(j, i) = 1.0;
      }
      return u;
    }
  }
  throw std::logic_error("unknown gate kind");
}

ComplexMatrix circuit_unitary(const GateList& gates, int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const Gate& g : gates) u = gate_matrix(g, n_qubits) * u;
  return u;
}

GateList inverse_circuit(const GateList& gates) {
  GateList out(gates.rbegin(), gates.rend());
  for (Gate& g : out) g.angle = -g.angle;
  return out;
}

double QuadraticPhase::at(std::size_t idx) const {
  const double y = static_cast<double>(idx) - offset;
  return a * y * y + b * y + c;
}

QuadraticPhase free_evolution_phase(const SawtoothParams& p) {
  return {-p.period() / 2.0, 0.0, 0.0, static_cast<double>(p.levels()) / 2.0};
}

QuadraticPhase kick_phase(const SawtoothParams& p) {
  // phi - pi = (2 pi / N)(idx - N/2)
  const double step = 2.0 * kPi / static_cast<double>(p.levels());
  return {p.kick_strength() * step * step / 2.0, 0.0, 0.0, static_cast<double>(p.levels()) / 2.0};
}

GateList decompose_diagonal(const QuadraticPhase& phase, int n_qubits) {
  if (!std::isfinite(phase.a) || !std::isfinite(phase.b) || !std::isfinite(phase.c) ||
      !std::isfinite(phase.offset)) {
    throw std::invalid_argument("decompose_diagonal: non-finite coefficient");
  }
  if (n_qubits < 1) throw std::invalid_argument("decompose_diagonal: need at least one qubit");
  // With y = idx - o and b_i^2 = b_i:
  //   y^2 = sum_i (4^i - 2 o 2^i) b_i + sum_{i<j} 2^{i+j+1} b_i b_j + o^2
  const double o = phase.offset;
  double global = phase.a * o * o - phase.b * o + phase.c;
  GateList gates;
  GateList singles;
  for (int i = 0; i < n_qubits; ++i) {
    const double wi = std::ldexp(1.0, i);
    const double alpha = reduce_angle(phase.a * (wi * wi - 2.0 * o * wi) + phase.b * wi);
    if (std::abs(alpha) <= kNegligibleAngle) continue;
    // diag(1, e^{i alpha}) = e^{i alpha / 2} rz(alpha)
    singles.push_back(Gate::rz(i, alpha));
    global += alpha / 2.0;
  }
  global = reduce_angle(global);
  if (std::abs(global) > kNegligibleAngle) gates.push_back(Gate::global(global));
  gates.insert(gates.end(), singles.begin(), singles.end());
  for (int i = 0; i < n_qubits; ++i) {
    for (int j = i + 1; j < n_qubits; ++j) {
      const double beta = reduce_angle(phase.a * std::ldexp(1.0, i + j + 1));
      if (std::abs(beta) > kNegligibleAngle) gates.push_back(Gate::cphase(i, j, beta));
    }
  }
  return gates;
}

GateList qft_circuit(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("qft_circuit: need at least one qubit");
  GateList gates;
  for (int target = n_qubits - 1; target >= 0; --target) {
    gates.push_back(Gate::hadamard(target));
    for (int control = target - 1; control >= 0; --control) {
      gates.push_back(Gate::cphase(control, target, kPi / std::ldexp(1.0, target - control)));
    }
  }
  for (int i = 0; i < n_qubits / 2; ++i) gates.push_back(Gate::swap(i, n_qubits - 1 - i));
  return gates;
}

GateList sawtooth_circuit(const SawtoothParams& p, bool include_final_free) {
  const int n = p.n_qubits();
  GateList gates = qft_circuit(n);
  const GateList kick = decompose_diagonal(kick_phase(p), n);
  gates.insert(gates.end(), kick.begin(), kick.end());
  const GateList inv = inverse_circuit(qft_circuit(n));
  gates.insert(gates.end(), inv.begin(), inv.end());
  if (include_final_free) {
    const GateList free = decompose_diagonal(free_evolution_phase(p), n);
    gates.insert(gates.end(), free.begin(), free.end());
  }
  return gates;
}

}  // namespace qsaw
