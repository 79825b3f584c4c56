#pragma once

// Dense complex linear algebra shared by every module: Hermitian
// exponentiation, column-stacking vectorization and the n-qubit Pauli basis.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qsaw {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown when a numerical invariant (unitarity, trace, positivity) is broken
// by data that passed its preconditions.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_square(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol);
bool is_unitary(const ComplexMatrix& m, double tol);

/// Returns log2(n) when n is a positive power of two, otherwise throws
/// std::invalid_argument.
int qubit_count(std::size_t dim);

/// Kronecker product a ⊗ b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// exp(-i H t) for Hermitian H, through the eigendecomposition of H.
ComplexMatrix hermitian_evolve(const ComplexMatrix& h, double t);

/// Density matrix over the momentum computational basis. Construction checks
/// Hermiticity, unit trace and positivity; a constructed value is always valid.
class DensityState {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenFloor = -1e-10;

  explicit DensityState(ComplexMatrix matrix);

  static DensityState basis_projector(std::size_t dim, std::size_t index);
  static DensityState maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

// Column stacking: entry (i, j) lands at i + N*j. Every superoperator formula
// in the library assumes this, so vec(A X B) = (B^T ⊗ A) vec(X).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexVector vectorize(const DensityState& rho);
ComplexMatrix unvectorize(const ComplexVector& v);
DensityState devectorize(const ComplexVector& v);

// Pauli strings over n qubits are indexed in base 4, digit q describing the
// qubit at bit position q of the computational index (0 = I, 1 = X, 2 = Y,
// 3 = Z). Coefficients are taken against the unnormalized strings with a 1/N
// prefactor, c_P = Tr(P rho) / N, so rho = sum_P c_P P.
enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

Pauli pauli_digit(std::size_t string_index, int qubit);
ComplexMatrix single_pauli(Pauli p);
ComplexMatrix pauli_string(int n_qubits, std::size_t string_index);

struct PauliCoefficients {
  int n_qubits = 0;
  std::vector<Complex> coeffs;  // length 4^n_qubits
};

PauliCoefficients pauli_expand(const ComplexMatrix& m);
PauliCoefficients pauli_expand(const DensityState& rho);
ComplexMatrix pauli_reconstruct_matrix(const PauliCoefficients& c);
DensityState pauli_reconstruct(const PauliCoefficients& c);

/// Operator acting as `op` on the qubit at bit position `qubit` of an
/// n-qubit register and as identity elsewhere.
ComplexMatrix embed_single(int n_qubits, int qubit, const ComplexMatrix& op);

}  // namespace qsaw
