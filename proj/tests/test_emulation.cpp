#include "doctest.h"
#include "test_util.hpp"

#include "qsaw/diagnostics.hpp"
#include "qsaw/emulation.hpp"
#include "qsaw/sawtooth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace qsaw;
using qsaw::testing::random_unitary;

namespace {

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

ExperimentConfig noiseless() {
  ExperimentConfig cfg;
  cfg.decoherence = false;
  return cfg;
}

std::vector<MomentumDistribution> series(const ExperimentConfig& cfg, const Superoperator& full,
                                         const Superoperator& last, int iterations) {
  std::vector<MomentumDistribution> out;
  for (const auto& rho : channel_series(prepared_input(cfg), full, last, iterations)) {
    out.push_back(momentum_distribution(rho));
  }
  return out;
}

}  // namespace

TEST_CASE("internal_hamiltonian") {
  SUBCASE("all zero") {
    SpinSystem s{2, {0.0, 0.0}, Eigen::MatrixXd::Zero(2, 2), CouplingForm::Full};
    CHECK(internal_hamiltonian(s).norm() == 0.0);
  }
  SUBCASE("acetylene system") {
    const SpinSystem s = acetylene_spin_system();
    const ComplexMatrix h = internal_hamiltonian(s);
    CHECK(h.rows() == 8);
    CHECK(is_hermitian(h, 1e-12));
    CHECK(s.offsets_hz[1] - s.offsets_hz[0] == doctest::Approx(1201.0));
    CHECK(s.couplings_hz(2, 1) == 235.7);
    CHECK(s.couplings_hz(1, 0) == 132.6);
    CHECK(s.couplings_hz(2, 0) == 42.9);
    // Full coupling conserves total z magnetisation.
    ComplexMatrix sz = ComplexMatrix::Zero(8, 8);
    for (int q = 0; q < 3; ++q) sz += embed_single(3, q, single_pauli(Pauli::Z));
    CHECK((h * sz - sz * h).norm() < 1e-9);
  }
  SUBCASE("two-qubit weak coupling spectrum") {
    const double v1 = 100.0, v2 = -37.0, j = 12.0;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = c(1, 0) = j;
    const ComplexMatrix h = internal_hamiltonian({2, {v1, v2}, c, CouplingForm::Weak});
    for (int idx = 0; idx < 4; ++idx) {
      const double s1 = (idx & 1) ? -1.0 : 1.0, s2 = (idx & 2) ? -1.0 : 1.0;
      const double expect = kRadPerHz * (v1 * s1 / 2 + v2 * s2 / 2 + j * s1 * s2 / 4);
      CHECK(h(idx, idx).real() == doctest::Approx(expect));
    }
    CHECK((h - ComplexMatrix(h.diagonal().asDiagonal())).norm() == 0.0);
  }
  SUBCASE("validation") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = 1.0;
    CHECK_THROWS(internal_hamiltonian({2, {0.0, 0.0}, c, CouplingForm::Full}));
  }
}

TEST_CASE("pseudopure_state") {
  const DensityState pure = pseudopure_state(3, 4, 1.0);
  CHECK(max_diff(pure.matrix(), DensityState::basis_projector(8, 4).matrix()) == 0.0);
  const DensityState half = pseudopure_state(3, 4, 0.5);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(half.matrix());
  for (int i = 0; i < 7; ++i) CHECK(eig.eigenvalues()(i) == doctest::Approx(0.5 / 8));
  CHECK(eig.eigenvalues()(7) == doctest::Approx(0.5 / 8 + 0.5));
  const MomentumDistribution w = momentum_distribution(half);
  CHECK(w.at_momentum(0) == doctest::Approx(0.5 / 8 + 0.5));
  CHECK(w.at_momentum(1) == doctest::Approx(0.5 / 8));
  CHECK_THROWS(pseudopure_state(3, 4, 0.0));
  CHECK_THROWS(pseudopure_state(3, 4, 1.1));
}

TEST_CASE("scale_gate") {
  std::mt19937_64 rng(1);
  const ComplexMatrix u = random_unitary(8, rng);
  CHECK(max_diff(scale_gate(u, 1.0), u) == 0.0);
  CHECK(max_diff(scale_gate(u, 0.0), ComplexMatrix::Identity(8, 8)) < 1e-12);
  const ComplexMatrix h = scale_gate(u, 0.5);
  CHECK(max_diff(h * h, u) < 1e-10);
  CHECK(is_unitary(scale_gate(u, 0.83), 1e-10));
  CHECK(max_diff(scale_gate(u, 0.7 + 1e-7), scale_gate(u, 0.7)) < 1e-5);
  SUBCASE("degenerate eigenphases at pi") {
    const ComplexMatrix z = embed_single(3, 0, single_pauli(Pauli::Z));
    const ComplexMatrix r = scale_gate(z, 0.5);
    CHECK(max_diff(r * r, z) < 1e-10);
  }
  SUBCASE("the QFT squares back") {
    const ComplexMatrix f = build_qft(8);
    const ComplexMatrix r = scale_gate(f, 0.5);
    CHECK(max_diff(r * r, f) < 1e-10);
  }
  CHECK_THROWS(scale_gate(2.0 * u, 0.5));
  CHECK_THROWS(scale_gate(u, -0.1));
}

TEST_CASE("coherent_error_gate") {
  std::mt19937_64 rng(2);
  const ComplexMatrix u = random_unitary(8, rng);
  CoherentErrorSettings off;
  CHECK(max_diff(coherent_error_gate(u, off), u) == 0.0);
  CoherentErrorSettings on;
  on.error_time = 30e-6;
  const ComplexMatrix e = coherent_error_gate(u, on);
  CHECK(average_gate_fidelity(e, u) < 1.0);
  CHECK(average_gate_fidelity(e, u) > 0.99);
  CHECK(max_diff(e, hermitian_evolve(internal_hamiltonian(on.system), 30e-6) * u) < 1e-12);
}

TEST_CASE("average_gate_fidelity and state_correlation") {
  std::mt19937_64 rng(3);
  const ComplexMatrix u = random_unitary(8, rng);
  CHECK(average_gate_fidelity(u, u) == doctest::Approx(1.0));
  CHECK(average_gate_fidelity(std::polar(1.0, 0.7) * u, u) == doctest::Approx(1.0));
  const ComplexMatrix f = build_qft(8);
  CHECK(average_gate_fidelity(ComplexMatrix::Identity(8, 8), f) == doctest::Approx(std::norm(f.trace()) / 64.0));
  CHECK_THROWS(average_gate_fidelity(u, ComplexMatrix::Identity(4, 4)));

  const DensityState a = DensityState::basis_projector(8, 4), b = DensityState::basis_projector(8, 3);
  CHECK(state_correlation(a, a) == doctest::Approx(1.0));
  CHECK(state_correlation(a, b) == doctest::Approx(0.0));
  const double eps = 0.3;
  const double purity = (1 - eps) * (1 - eps) / 8 + 2 * eps * (1 - eps) / 8 + eps * eps;
  const double overlap = (1 - eps) / 8 + eps;
  CHECK(state_correlation(pseudopure_state(3, 4, eps), a) == doctest::Approx(overlap / std::sqrt(purity)));
}

TEST_CASE("rf distribution files") {
  SUBCASE("one channel with header and comments") {
    const RfDistribution d = parse_rf_distribution("# comment\nscale,probability\n0.9, 0.25\n1.0;0.5 # tail\n1.1\t0.25\n\n");
    REQUIRE(d.bins.size() == 3);
    CHECK_FALSE(d.joint);
    CHECK(d.bins[1].carbon == 1.0);
    CHECK(d.bins[1].hydrogen == 1.0);
    CHECK(d.nominal_bin() == 1);
  }
  SUBCASE("joint") {
    const RfDistribution d = parse_rf_distribution("0.9 1.0 0.5\n1.0 0.95 0.5\n");
    CHECK(d.joint);
    CHECK(d.bins[0].hydrogen == 1.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS(parse_rf_distribution("0.9,0.5\n1.0,0.4\n"));
    CHECK_THROWS(parse_rf_distribution("0.9,0.5\n1.0,0.4,0.1\n"));
    CHECK_THROWS(parse_rf_distribution("-0.9,1.0\n"));
    CHECK_THROWS(parse_rf_distribution("0.9,1.0\nabc,def\n"));
    CHECK_THROWS(parse_rf_distribution(""));
    CHECK_THROWS(load_rf_distribution("/nonexistent/rf.csv"));
  }
  SUBCASE("shipped synthetic file equals the built-in table") {
    const RfDistribution file = load_rf_distribution(std::filesystem::path(QSAW_CONFIG_DIR) / "rf_carbon_synthetic.csv");
    const RfDistribution builtin = RfDistribution::synthetic_carbon();
    REQUIRE(file.bins.size() == 9);
    double mean = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(file.bins[i].carbon == builtin.bins[i].carbon);
      CHECK(file.bins[i].probability == builtin.bins[i].probability);
      mean += file.bins[i].carbon * file.bins[i].probability;
    }
    CHECK(mean < 1.0);
    CHECK(mean > 0.95);
  }
}

TEST_CASE("build_iteration_channel") {
  SUBCASE("noise off reduces to the ideal map") {
    const ExperimentConfig cfg = noiseless();
    const Superoperator s = build_iteration_channel(cfg, RfBin{});
    CHECK(max_diff(s.matrix(), unitary_to_superop(build_sawtooth(cfg.params)).matrix()) < 1e-10);
    const Superoperator last = build_iteration_channel(cfg, RfBin{}, true);
    CHECK(max_diff(last.matrix(), unitary_to_superop(build_sawtooth(cfg.params, false)).matrix()) < 1e-10);
  }
  SUBCASE("decoherence makes a non-unitary trace-preserving channel") {
    const ExperimentConfig cfg;
    const Superoperator s = build_iteration_channel(cfg, RfBin{});
    CHECK(s.is_trace_preserving(1e-10));
    CHECK(s.is_completely_positive());
    CHECK(kraus_decompose(s).magnitudes[0] < std::sqrt(8.0) - 1e-3);
  }
  SUBCASE("per-iteration relaxation equals per-gate when the gates commute with it") {
    // Relaxation with zero rates is the identity in both modes.
    ExperimentConfig a;
    a.rates = RelaxationRates::uniform(3, 0.0, 0.0);
    ExperimentConfig b = a;
    b.relaxation_mode = RelaxationMode::PerIteration;
    CHECK(max_diff(build_iteration_channel(a, RfBin{}).matrix(), build_iteration_channel(b, RfBin{}).matrix()) < 1e-12);
    ExperimentConfig c;
    c.relaxation_mode = RelaxationMode::PerIteration;
    CHECK(build_iteration_channel(c, RfBin{}).is_trace_preserving());
  }
  SUBCASE("an off-nominal bin broadens the distribution") {
    const ExperimentConfig cfg;
    const RfBin low{0.9, 0.9, 1.0};
    const auto w_nom = series(cfg, build_iteration_channel(cfg, RfBin{}), build_iteration_channel(cfg, RfBin{}, true), 4);
    const auto w_low = series(cfg, build_iteration_channel(cfg, low), build_iteration_channel(cfg, low, true), 4);
    CHECK(second_moment(w_low[4]) > second_moment(w_nom[4]));
  }
  SUBCASE("joint mode with unit scales is the unscaled channel") {
    ExperimentConfig cfg;
    cfg.rf = parse_rf_distribution("1.0 1.0 1.0\n");
    CHECK(max_diff(build_iteration_channel(cfg, cfg.rf.bins[0]).matrix(), build_iteration_channel(ExperimentConfig{}, RfBin{}).matrix()) < 1e-10);
    const RfBin split{0.9, 1.05, 1.0};
    CHECK(build_iteration_channel(cfg, split).is_trace_preserving());
  }
}

TEST_CASE("ensemble_channel") {
  SUBCASE("delta distribution equals the single bin") {
    const ExperimentConfig cfg;
    CHECK(max_diff(ensemble_channel(cfg).matrix(), build_iteration_channel(cfg, RfBin{}).matrix()) == 0.0);
  }
  ExperimentConfig cfg;
  cfg.rf = RfDistribution::synthetic_carbon();
  SUBCASE("W after one iteration is the weighted average of per-bin W") {
    const DensityState rho0 = prepared_input(cfg);
    const MomentumDistribution w = momentum_distribution(ensemble_channel(cfg, true).apply(rho0));
    std::vector<double> avg(8, 0.0);
    for (const auto& b : cfg.rf.bins) {
      const MomentumDistribution wb = momentum_distribution(build_iteration_channel(cfg, b, true).apply(rho0));
      for (std::size_t i = 0; i < 8; ++i) avg[i] += b.probability * wb.at_index(i);
    }
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(avg[i] - w.at_index(i)) < 1e-12);
  }
  SUBCASE("threaded build matches serial") {
    CHECK(max_diff(ensemble_channel(cfg, false, 4).matrix(), ensemble_channel(cfg, false, 1).matrix()) < 1e-12);
  }
  SUBCASE("broad distribution raises the baseline") {
    const ExperimentConfig delta;
    const auto wb = series(cfg, ensemble_channel(cfg), ensemble_channel(cfg, true), 3);
    const auto wd = series(delta, ensemble_channel(delta), ensemble_channel(delta, true), 3);
    CHECK(baseline_offset(wb[3]) > baseline_offset(wd[3]));
    for (std::size_t t = 1; t < wb.size(); ++t) CHECK(baseline_offset(wb[t]) >= baseline_offset(wb[t - 1]));
  }
  SUBCASE("near-nominal bins stay localized") {
    const RfDistribution rf = RfDistribution::synthetic_carbon();
    const auto ideal = apply_iterations(DensityState::basis_projector(8, 4), cfg.params, 4);
    for (const auto& b : rf.bins) {
      if (std::abs(b.carbon - 1.0) > 0.05) continue;
      const auto w = series(cfg, build_iteration_channel(cfg, b), build_iteration_channel(cfg, b, true), 4);
      for (int t = 0; t <= 4; ++t) CHECK(std::abs(fwhm(w[t]) - fwhm(ideal[t])) <= 1.0);
    }
  }
}

TEST_CASE("noise-free pipeline reproduces the ideal series") {
  const ExperimentConfig cfg = noiseless();
  const auto w = series(cfg, ensemble_channel(cfg), ensemble_channel(cfg, true), 10);
  const auto ideal = apply_iterations(DensityState::basis_projector(8, 4), cfg.params, 10);
  for (std::size_t t = 0; t < w.size(); ++t)
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(w[t].at_index(i) - ideal[t].at_index(i)) < 1e-10);
}

TEST_CASE("prepared input and channel_series") {
  ExperimentConfig cfg;
  const DensityState rho0 = prepared_input(cfg);
  const MomentumDistribution w = momentum_distribution(rho0);
  CHECK(w.at_momentum(0) < 1.0);
  CHECK(w.at_momentum(0) > 0.9);
  cfg.decoherence = false;
  CHECK(max_diff(prepared_input(cfg).matrix(), DensityState::basis_projector(8, 4).matrix()) == 0.0);
  const Superoperator id = Superoperator::identity(8);
  CHECK(channel_series(rho0, id, id, 3).size() == 4);
  CHECK_THROWS(channel_series(rho0, id, id, -1));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.polarization = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = ExperimentConfig{};
  cfg.durations.kick = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = ExperimentConfig{};
  cfg.iterations = -1;
  CHECK_THROWS(cfg.validate());
}
