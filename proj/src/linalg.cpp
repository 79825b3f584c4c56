#include "qsaw/linalg.hpp"

#include <cmath>
#include <string>

namespace qsaw {

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return is_square(m) && (m - m.adjoint()).norm() <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!is_square(m)) return false;
  const auto n = m.rows();
  return (m.adjoint() * m - ComplexMatrix::Identity(n, n)).norm() <= tol;
}

int qubit_count(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix hermitian_evolve(const ComplexMatrix& h, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("hermitian_evolve: non-finite time");
  if (!is_hermitian(h, 1e-10)) throw std::invalid_argument("hermitian_evolve: generator is not Hermitian");
  // Symmetrize so the solver sees an exactly Hermitian input.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("hermitian_evolve: eigendecomposition failed");
  const RealVector& w = eig.eigenvalues();
  ComplexVector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::polar(1.0, -w(k) * t);
  const ComplexMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

// --- DensityState ----------------------------------------------------------

DensityState::DensityState(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (!is_square(matrix_) || matrix_.rows() == 0) {
    throw std::invalid_argument("density matrix must be square and non-empty");
  }
  if (!matrix_.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
  if (!is_hermitian(matrix_, kHermitianTol)) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol) {
    throw std::invalid_argument("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (matrix_ + matrix_.adjoint()),
                                                   Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < kEigenFloor) {
    throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

DensityState DensityState::basis_projector(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityState(std::move(m));
}

DensityState DensityState::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityState(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

// --- vectorization ---------------------------------------------------------

ComplexVector vectorize(const ComplexMatrix& m) {
  // Eigen storage is column-major, so the raw buffer is already column-stacked.
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexVector vectorize(const DensityState& rho) { return vectorize(rho.matrix()); }

ComplexMatrix unvectorize(const ComplexVector& v) {
  const auto len = static_cast<std::size_t>(v.size());
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len || len == 0) {
    throw std::invalid_argument("vector length " + std::to_string(len) + " is not a perfect square");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

DensityState devectorize(const ComplexVector& v) { return DensityState(unvectorize(v)); }

// --- Pauli basis -----------------------------------------------------------

Pauli pauli_digit(std::size_t string_index, int qubit) {
  return static_cast<Pauli>((string_index >> (2 * qubit)) & 3u);
}

ComplexMatrix single_pauli(Pauli p) {
  ComplexMatrix m(2, 2);
  const Complex i1(0.0, 1.0);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i1, i1, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

ComplexMatrix pauli_string(int n_qubits, std::size_t string_index) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = n_qubits - 1; q >= 0; --q) out = kron(out, single_pauli(pauli_digit(string_index, q)));
  return out;
}

ComplexMatrix embed_single(int n_qubits, int qubit, const ComplexMatrix& op) {
  if (qubit < 0 || qubit >= n_qubits) throw std::invalid_argument("qubit index out of range");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  for (int q = n_qubits - 1; q >= 0; --q) out = kron(out, q == qubit ? op : id);
  return out;
}

PauliCoefficients pauli_expand(const ComplexMatrix& m) {
  if (!is_square(m)) throw std::invalid_argument("pauli_expand: matrix is not square");
  const auto dim = static_cast<std::size_t>(m.rows());
  const int n = qubit_count(dim);
  PauliCoefficients c{n, std::vector<Complex>(std::size_t{1} << (2 * n))};
  for (std::size_t s = 0; s < c.coeffs.size(); ++s) {
    // Pauli strings are Hermitian, so Tr(P^† m) = Tr(P m).
    c.coeffs[s] = (pauli_string(n, s) * m).trace() / static_cast<double>(dim);
  }
  return c;
}

PauliCoefficients pauli_expand(const DensityState& rho) { return pauli_expand(rho.matrix()); }

ComplexMatrix pauli_reconstruct_matrix(const PauliCoefficients& c) {
  if (c.n_qubits < 0 || c.coeffs.size() != (std::size_t{1} << (2 * c.n_qubits))) {
    throw std::invalid_argument("pauli_reconstruct: coefficient count does not match 4^n");
  }
  const auto dim = Eigen::Index{1} << c.n_qubits;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (std::size_t s = 0; s < c.coeffs.size(); ++s) m += c.coeffs[s] * pauli_string(c.n_qubits, s);
  return m;
}

DensityState pauli_reconstruct(const PauliCoefficients& c) {
  return DensityState(pauli_reconstruct_matrix(c));
}

}  // namespace qsaw
