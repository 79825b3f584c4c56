#pragma once

// CPTP channel algebra on column-stacked density matrices.

#include "qsaw/linalg.hpp"

#include <cstddef>
#include <vector>

namespace qsaw {

/// N^2 x N^2 matrix acting on vec(rho). Values are immutable once built.
class Superoperator {
 public:
  explicit Superoperator(ComplexMatrix matrix);

  static Superoperator identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  DensityState apply(const DensityState& rho) const;

  /// The adjoint map sends I to I, i.e. Tr(S(rho)) = Tr(rho) for all rho.
  bool is_trace_preserving(double tol = 1e-10) const;
  /// S(I) = I.
  bool is_unital(double tol = 1e-10) const;
  /// Smallest Choi eigenvalue >= -tol.
  bool is_completely_positive(double tol = 1e-8) const;

 private:
  std::size_t dim_;
  ComplexMatrix matrix_;
};

struct WeightedChannel {
  Superoperator channel;
  double probability;
};

/// Per-qubit longitudinal (r1) and transverse (r2) rates in 1/s, indexed by
/// bit position.
struct RelaxationRates {
  std::vector<double> r1;
  std::vector<double> r2;

  static RelaxationRates uniform(int n_qubits, double r1, double r2);
  int n_qubits() const { return static_cast<int>(r1.size()); }
  void validate() const;  // rates >= 0 and r2 >= r1 / 2 (complete positivity)
  /// Decay rate of a Pauli string: sum over qubits of 0 (I), r1 (Z), r2 (X, Y).
  double string_rate(std::size_t string_index) const;
};

/// S = conj(U) ⊗ U, so S vec(rho) = vec(U rho U^dagger).
Superoperator unitary_to_superop(const ComplexMatrix& u, bool require_unitary = true);

/// Channel diagonal in the Pauli-string basis: every string P is scaled by
/// exp(-rate(P) tau). Unital and trace preserving.
Superoperator relaxation_superop(const RelaxationRates& rates, double tau);

/// sum_k p_k S_k. Probabilities must be non-negative and sum to 1 +- 1e-6.
Superoperator mix(const std::vector<WeightedChannel>& channels);

/// second ∘ first.
Superoperator compose(const Superoperator& second, const Superoperator& first);

/// Choi matrix under the reshuffle C[i + N k, j + N l] = S[i + N j, k + N l],
/// so that a channel with Kraus operators A_a has C = sum_a vec(A_a) vec(A_a)^dagger.
ComplexMatrix choi_matrix(const Superoperator& s);

struct KrausSet {
  std::vector<ComplexMatrix> operators;  // sorted by descending magnitude
  std::vector<double> magnitudes;        // Frobenius norms

  std::size_t size() const { return operators.size(); }
};

/// Eigen-decomposes the Choi matrix. Eigenvalues below -1e-6 mean the input
/// is not completely positive and raise NumericalError; eigenvalues at or
/// below 1e-10 are treated as zero and produce no operator.
KrausSet kraus_decompose(const Superoperator& s);

Superoperator kraus_to_superop(const KrausSet& k);

/// sum_a A_a^dagger A_a.
ComplexMatrix kraus_completeness(const KrausSet& k);

struct Bandedness {
  double ratio = 0.0;
  bool zero_matrix = false;
};

/// Fraction of squared magnitude within torus distance `band_width` of the
/// diagonal.
Bandedness bandedness(const ComplexMatrix& m, int band_width = 1);

}  // namespace qsaw
