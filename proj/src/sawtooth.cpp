#include "qsaw/sawtooth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <thread>

namespace qsaw {

SawtoothParams::SawtoothParams(double chaos_k, int winding_l, int n_qubits)
    : chaos_(chaos_k), winding_(winding_l), n_qubits_(n_qubits) {
  if (!std::isfinite(chaos_k)) throw std::invalid_argument("K must be finite");
  if (winding_l < 1) throw std::invalid_argument("L must be a positive integer");
  if (n_qubits < 1 || n_qubits > 10) throw std::invalid_argument("qubit count must be in [1, 10]");
}

double SawtoothParams::period() const {
  return 2.0 * kPi * winding_ / static_cast<double>(levels());
}

double SawtoothParams::kick_strength() const { return chaos_ / period(); }

double SawtoothParams::diffusion() const {
  const double k = kick_strength();
  return kPi * kPi / 3.0 * k * k;
}

SawtoothParams default_params() { return SawtoothParams(1.5, 7, 3); }

// --- classical -------------------------------------------------------------

namespace {

double wrap(double x, double lo, double width) {
  double y = std::fmod(x - lo, width);
  if (y < 0.0) y += width;
  // fmod of a tiny negative can round up to exactly `width`.
  if (y >= width) y = 0.0;
  return lo + y;
}

}  // namespace

ClassicalTrajectory classical_step(ClassicalTrajectory tr, const SawtoothParams& p) {
  const double n = static_cast<double>(p.levels());
  double m = tr.m + p.kick_strength() * (tr.theta - kPi);
  double theta = tr.theta + p.period() * m;
  m = wrap(m, -n / 2.0, n);
  theta = wrap(theta, 0.0, 2.0 * kPi);
  return {theta, m};
}

int classical_bin(double m, std::size_t n) {
  const int half = static_cast<int>(n / 2);
  int b = static_cast<int>(std::floor(m + 0.5));
  if (b >= half) b -= static_cast<int>(n);
  if (b < -half) b += static_cast<int>(n);
  return b;
}

double draw_angle(std::uint64_t bits) {
  return 2.0 * kPi * static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<MomentumDistribution> classical_ensemble(const SawtoothParams& p, std::size_t n_traj,
                                                     int t_max, std::uint64_t seed, unsigned threads) {
  if (n_traj == 0) throw std::invalid_argument("classical_ensemble: need at least one trajectory");
  if (t_max < 0) throw std::invalid_argument("classical_ensemble: negative iteration count");
  const std::size_t n = p.levels();
  const auto steps = static_cast<std::size_t>(t_max) + 1;

  std::vector<double> theta0(n_traj);
  std::mt19937_64 gen(seed);
  for (double& th : theta0) th = draw_angle(gen());

  // counts[t * n + idx]
  auto run_chunk = [&](std::size_t begin, std::size_t end, std::vector<std::uint64_t>& counts) {
    counts.assign(steps * n, 0);
    for (std::size_t i = begin; i < end; ++i) {
      ClassicalTrajectory tr{theta0[i], 0.0};
      for (std::size_t t = 0; t < steps; ++t) {
        ++counts[t * n + index_of_momentum(classical_bin(tr.m, n), n)];
        tr = classical_step(tr, p);
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_traj)));
  std::vector<std::vector<std::uint64_t>> partial(workers);
  if (workers == 1) {
    run_chunk(0, n_traj, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(run_chunk, n_traj * w / workers, n_traj * (w + 1) / workers, std::ref(partial[w]));
    }
    for (auto& th : pool) th.join();
  }

  std::vector<MomentumDistribution> out;
  out.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> w(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::uint64_t c = 0;
      for (const auto& part : partial) c += part[t * n + idx];
      w[idx] = static_cast<double>(c) / static_cast<double>(n_traj);
    }
    out.emplace_back(std::move(w));
  }
  return out;
}

// --- quantum ---------------------------------------------------------------

ComplexMatrix build_qft(std::size_t n) {
  qubit_count(n);
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix f(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      // Reduce j*idx mod N first so the phase argument stays small.
      const auto r = static_cast<double>((j * idx) % dim);
      f(j, idx) = std::polar(norm, 2.0 * kPi * r / static_cast<double>(n));
    }
  }
  return f;
}

ComplexMatrix build_free_evolution(const SawtoothParams& p) {
  const std::size_t n = p.levels();
  ComplexVector d(static_cast<Eigen::Index>(n));
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double m = momentum_of_index(idx, n);
    d(static_cast<Eigen::Index>(idx)) = std::polar(1.0, -p.period() * m * m / 2.0);
  }
  return d.asDiagonal();
}

ComplexMatrix build_kick(const SawtoothParams& p) {
  const std::size_t n = p.levels();
  ComplexVector d(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double x = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n) - kPi;
    d(static_cast<Eigen::Index>(j)) = std::polar(1.0, p.kick_strength() * x * x / 2.0);
  }
  return d.asDiagonal();
}

ComplexMatrix build_sawtooth(const SawtoothParams& p, bool include_final_free) {
  const ComplexMatrix f = build_qft(p.levels());
  ComplexMatrix u = f.adjoint() * build_kick(p) * f;
  if (include_final_free) u = build_free_evolution(p) * u;
  return u;
}

std::vector<MomentumDistribution> apply_iterations(const DensityState& rho0, const ComplexMatrix& u,
                                                   int iterations) {
  if (iterations < 0) throw std::invalid_argument("apply_iterations: negative iteration count");
  if (u.rows() != static_cast<Eigen::Index>(rho0.dim()) || !is_square(u)) {
    throw std::invalid_argument("apply_iterations: dimension mismatch");
  }
  std::vector<MomentumDistribution> out;
  out.reserve(static_cast<std::size_t>(iterations) + 1);
  ComplexMatrix rho = rho0.matrix();
  out.push_back(momentum_distribution(rho0));
  for (int t = 1; t <= iterations; ++t) {
    rho = u * rho * u.adjoint();
    out.push_back(momentum_distribution(DensityState(rho)));
  }
  return out;
}

std::vector<MomentumDistribution> apply_iterations(const DensityState& rho0, const SawtoothParams& p,
                                                   int iterations) {
  return apply_iterations(rho0, build_sawtooth(p), iterations);
}

}  // namespace qsaw
