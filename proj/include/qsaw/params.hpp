#pragma once

#include <cstddef>

namespace qsaw {

/// Sawtooth map parameters. Only (K, L, n_qubits) are stored; everything
/// else is derived so that N = 2 pi L / T and K = k T hold by construction.
class SawtoothParams {
 public:
  SawtoothParams(double chaos_k, int winding_l, int n_qubits);

  double chaos() const { return chaos_; }  // K
  int winding() const { return winding_; }  // L
  int n_qubits() const { return n_qubits_; }
  std::size_t levels() const { return std::size_t{1} << n_qubits_; }  // N

  double period() const;            // T = 2 pi L / N
  double kick_strength() const;     // k = K / T
  double diffusion() const;         // D = (pi^2 / 3) k^2

 private:
  double chaos_;
  int winding_;
  int n_qubits_;
};

SawtoothParams default_params();  // K = 1.5, L = 7, three qubits

}  // namespace qsaw
