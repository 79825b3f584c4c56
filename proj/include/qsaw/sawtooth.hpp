#pragma once

// Classical and quantum sawtooth map dynamics on the momentum torus.
//
// Momentum label m in [-N/2, N/2) is stored at computational index
// idx = m + N/2, so idx 4 (binary 100) is m = 0 for three qubits. With this
// labelling the momentum/position overlap is the plain DFT kernel.

#include "qsaw/diagnostics.hpp"
#include "qsaw/linalg.hpp"
#include "qsaw/params.hpp"

#include <cstdint>
#include <vector>

namespace qsaw {

inline int momentum_of_index(std::size_t idx, std::size_t n) {
  return static_cast<int>(idx) - static_cast<int>(n / 2);
}
inline std::size_t index_of_momentum(int m, std::size_t n) {
  return static_cast<std::size_t>(m + static_cast<int>(n / 2));
}

struct ClassicalTrajectory {
  double theta;  // [0, 2 pi)
  double m;      // [-N/2, N/2)
};

/// One kick plus free rotation, both coordinates wrapped afterwards.
ClassicalTrajectory classical_step(ClassicalTrajectory tr, const SawtoothParams& p);

/// Histogram bin of a continuous momentum: bins are [m - 1/2, m + 1/2) with
/// the bin at +N/2 folded onto -N/2.
int classical_bin(double m, std::size_t n);

/// Uniform angle in [0, 2 pi) from one 64-bit draw: the top 53 bits scaled by
/// 2^-53. Fixed here so histograms do not depend on the standard library's
/// distribution implementation.
double draw_angle(std::uint64_t bits);

/// Ensemble of trajectories starting at m = 0 with angles drawn from
/// std::mt19937_64(seed). Returns one normalized histogram per iteration
/// 0..t_max. Counts are integers, so any `threads` value gives identical
/// output.
std::vector<MomentumDistribution> classical_ensemble(const SawtoothParams& p, std::size_t n_traj,
                                                     int t_max, std::uint64_t seed,
                                                     unsigned threads = 1);

/// F[j, idx] = exp(2 pi i j idx / N) / sqrt(N): maps momentum amplitudes to
/// position amplitudes.
ComplexMatrix build_qft(std::size_t n);

ComplexMatrix build_free_evolution(const SawtoothParams& p);  // exp(-i T m^2 / 2)
ComplexMatrix build_kick(const SawtoothParams& p);            // exp(+i k (phi - pi)^2 / 2)

/// U_m F^dagger U_phi F, or F^dagger U_phi F without the free evolution.
ComplexMatrix build_sawtooth(const SawtoothParams& p, bool include_final_free = true);

/// Momentum populations of U^t rho0 U^dagger^t for t = 0..iterations.
std::vector<MomentumDistribution> apply_iterations(const DensityState& rho0, const ComplexMatrix& u,
                                                   int iterations);
std::vector<MomentumDistribution> apply_iterations(const DensityState& rho0, const SawtoothParams& p,
                                                   int iterations);

}  // namespace qsaw
