#include "qsaw/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsaw {

namespace {

std::size_t superop_dim(const ComplexMatrix& m) {
  if (!is_square(m)) throw std::invalid_argument("superoperator must be square");
  const auto len = static_cast<std::size_t>(m.rows());
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n == 0 || n * n != len) throw std::invalid_argument("superoperator size is not N^2");
  return n;
}

}  // namespace

Superoperator::Superoperator(ComplexMatrix matrix) : dim_(superop_dim(matrix)), matrix_(std::move(matrix)) {
  if (!matrix_.allFinite()) throw std::invalid_argument("superoperator has non-finite entries");
}

Superoperator Superoperator::identity(std::size_t dim) {
  const auto n2 = static_cast<Eigen::Index>(dim * dim);
  return Superoperator(ComplexMatrix::Identity(n2, n2));
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != dim_ || !is_square(rho)) {
    throw std::invalid_argument("superoperator applied to a matrix of the wrong size");
  }
  return unvectorize(matrix_ * vectorize(rho));
}

DensityState Superoperator::apply(const DensityState& rho) const { return DensityState(apply(rho.matrix())); }

bool Superoperator::is_trace_preserving(double tol) const {
  // Row of the adjoint acting on vec(I): sum over the diagonal output rows.
  const auto n = static_cast<Eigen::Index>(dim_);
  ComplexVector tr_row = ComplexVector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) tr_row += matrix_.row(i + n * i).transpose();
  return (tr_row - vectorize(ComplexMatrix::Identity(n, n))).norm() <= tol;
}

bool Superoperator::is_unital(double tol) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  return (apply(id) - id).norm() <= tol;
}

bool Superoperator::is_completely_positive(double tol) const {
  const ComplexMatrix c = choi_matrix(*this);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

RelaxationRates RelaxationRates::uniform(int n_qubits, double r1, double r2) {
  RelaxationRates r{std::vector<double>(static_cast<std::size_t>(n_qubits), r1),
                    std::vector<double>(static_cast<std::size_t>(n_qubits), r2)};
  r.validate();
  return r;
}

void RelaxationRates::validate() const {
  if (r1.size() != r2.size()) throw std::invalid_argument("relaxation rates: r1/r2 length mismatch");
  for (std::size_t q = 0; q < r1.size(); ++q) {
    if (!(r1[q] >= 0.0) || !(r2[q] >= 0.0) || !std::isfinite(r1[q]) || !std::isfinite(r2[q])) {
      throw std::invalid_argument("relaxation rates must be finite and non-negative");
    }
    // T2 <= 2 T1; below this the Pauli-diagonal map is not completely positive.
    if (r2[q] < 0.5 * r1[q]) {
      throw std::invalid_argument("relaxation rates: r2 must be at least r1 / 2 on every qubit");
    }
  }
}

double RelaxationRates::string_rate(std::size_t string_index) const {
  double r = 0.0;
  for (int q = 0; q < n_qubits(); ++q) {
    switch (pauli_digit(string_index, q)) {
      case Pauli::I: break;
      case Pauli::Z: r += r1[static_cast<std::size_t>(q)]; break;
      case Pauli::X:
      case Pauli::Y: r += r2[static_cast<std::size_t>(q)]; break;
    }
  }
  return r;
}

Superoperator unitary_to_superop(const ComplexMatrix& u, bool require_unitary) {
  if (!is_square(u)) throw std::invalid_argument("unitary_to_superop: matrix is not square");
  if (require_unitary && !is_unitary(u, 1e-10)) {
    throw std::invalid_argument("unitary_to_superop: matrix is not unitary");
  }
  return Superoperator(kron(u.conjugate(), u));
}

Superoperator relaxation_superop(const RelaxationRates& rates, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("relaxation_superop: tau must be >= 0");
  rates.validate();
  const int n = rates.n_qubits();
  if (n < 1) throw std::invalid_argument("relaxation_superop: no qubits");
  const auto dim = Eigen::Index{1} << n;
  ComplexMatrix s = ComplexMatrix::Zero(dim * dim, dim * dim);
  const std::size_t strings = std::size_t{1} << (2 * n);
  // Pauli strings are orthogonal with <P, P> = N, so the projector onto P is
  // vec(P) vec(P)^dagger / N.
  for (std::size_t p = 0; p < strings; ++p) {
    const ComplexVector v = vectorize(pauli_string(n, p));
    const double decay = std::exp(-rates.string_rate(p) * tau);
    s.noalias() += (decay / static_cast<double>(dim)) * (v * v.adjoint());
  }
  return Superoperator(std::move(s));
}

Superoperator mix(const std::vector<WeightedChannel>& channels) {
  if (channels.empty()) throw std::invalid_argument("mix: no channels");
  double total = 0.0;
  for (const auto& c : channels) {
    if (!(c.probability >= 0.0)) throw std::invalid_argument("mix: negative probability");
    if (c.channel.dim() != channels.front().channel.dim()) throw std::invalid_argument("mix: dimension mismatch");
    total += c.probability;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("mix: probabilities sum to " + std::to_string(total));
  ComplexMatrix s = ComplexMatrix::Zero(channels.front().channel.matrix().rows(),
                                        channels.front().channel.matrix().cols());
  for (const auto& c : channels) s += c.probability * c.channel.matrix();
  return Superoperator(std::move(s));
}

Superoperator compose(const Superoperator& second, const Superoperator& first) {
  if (second.dim() != first.dim()) throw std::invalid_argument("compose: dimension mismatch");
  return Superoperator(second.matrix() * first.matrix());
}

ComplexMatrix choi_matrix(const Superoperator& s) {
  const auto n = static_cast<Eigen::Index>(s.dim());
  const ComplexMatrix& m = s.matrix();
  ComplexMatrix c(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) c(i + n * k, j + n * l) = m(i + n * j, k + n * l);
  return c;
}

KrausSet kraus_decompose(const Superoperator& s) {
  const ComplexMatrix c = choi_matrix(s);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (c + c.adjoint()));
  if (eig.info() != Eigen::Success) throw NumericalError("kraus_decompose: eigendecomposition failed");
  const RealVector& w = eig.eigenvalues();
  if (w.minCoeff() < -1e-6) {
    throw NumericalError("kraus_decompose: Choi eigenvalue " + std::to_string(w.minCoeff()) +
                         " indicates a map that is not completely positive");
  }
  KrausSet out;
  // Eigen sorts ascending; walk from the top.
  for (Eigen::Index k = w.size() - 1; k >= 0; --k) {
    if (w(k) <= 1e-10) break;
    const double mag = std::sqrt(w(k));
    out.operators.push_back(unvectorize(ComplexVector(mag * eig.eigenvectors().col(k))));
    out.magnitudes.push_back(mag);
  }
  return out;
}

Superoperator kraus_to_superop(const KrausSet& k) {
  if (k.operators.empty()) throw std::invalid_argument("kraus_to_superop: empty Kraus set");
  const auto n = k.operators.front().rows();
  ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& a : k.operators) s += kron(a.conjugate(), a);
  return Superoperator(std::move(s));
}

ComplexMatrix kraus_completeness(const KrausSet& k) {
  if (k.operators.empty()) throw std::invalid_argument("kraus_completeness: empty Kraus set");
  const auto n = k.operators.front().rows();
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (const auto& a : k.operators) acc += a.adjoint() * a;
  return acc;
}

Bandedness bandedness(const ComplexMatrix& m, int band_width) {
  if (!is_square(m)) throw std::invalid_argument("bandedness: matrix is not square");
  const auto n = m.rows();
  if (band_width < 0 || band_width >= n) throw std::invalid_argument("bandedness: band width out of range");
  double inside = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = std::norm(m(i, j));
      const auto d = std::abs(i - j);
      total += w;
      if (std::min(d, n - d) <= band_width) inside += w;
    }
  }
  if (total == 0.0) return {0.0, true};
  return {inside / total, false};
}

}  // namespace qsaw
