#include "qsaw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsaw {

MomentumDistribution::MomentumDistribution(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty() || values_.size() % 2 != 0) {
    throw std::invalid_argument("momentum distribution needs an even, non-zero number of levels");
  }
  double sum = 0.0;
  for (double& w : values_) {
    if (!std::isfinite(w) || w < -kNegativeTol) {
      throw std::invalid_argument("momentum distribution has a negative or non-finite population");
    }
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    throw std::invalid_argument("momentum distribution sums to " + std::to_string(sum));
  }
}

int torus_delta(int m, int origin, int n) {
  int d = (m - origin) % n;
  if (d < -n / 2) d += n;
  if (d >= n / 2) d -= n;
  return d;
}

MomentumDistribution momentum_distribution(const DensityState& rho) {
  const ComplexMatrix& m = rho.matrix();
  std::vector<double> w(rho.dim());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    w[i] = m(k, k).real();
  }
  const double tr = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(tr - 1.0) > 1e-6) throw NumericalError("momentum_distribution: trace deviates from 1");
  return MomentumDistribution(std::move(w));
}

double second_moment(const MomentumDistribution& w, int origin, DistanceMetric metric) {
  const int n = static_cast<int>(w.size());
  double acc = 0.0;
  for (int m = -n / 2; m < n / 2; ++m) {
    const int d = metric == DistanceMetric::Torus ? torus_delta(m, origin, n) : m - origin;
    acc += w.at_momentum(m) * static_cast<double>(d) * static_cast<double>(d);
  }
  return acc;
}

double baseline_offset(const MomentumDistribution& w) {
  return *std::min_element(w.values().begin(), w.values().end());
}

double fwhm(const MomentumDistribution& w) {
  const auto& v = w.values();
  const int n = static_cast<int>(v.size());
  const double top = *std::max_element(v.begin(), v.end());
  const double base = baseline_offset(w);
  if (top - base < 1e-12) return static_cast<double>(n);

  // Peak selection: exact maxima only, nearest to m = 0, then smaller m.
  int peak = 0;
  bool found = false;
  for (int idx = 0; idx < n; ++idx) {
    if (v[idx] != top) continue;
    const int m = idx - n / 2;
    const int best_m = peak - n / 2;
    if (!found || std::abs(m) < std::abs(best_m) || (std::abs(m) == std::abs(best_m) && m < best_m)) {
      peak = idx;
      found = true;
    }
  }

  const double half = base + 0.5 * (top - base);
  auto walk = [&](int dir) {
    int prev = peak;
    for (int step = 1; step < n; ++step) {
      const int j = ((peak + dir * step) % n + n) % n;
      if (v[j] <= half) return (step - 1) + (v[prev] - half) / (v[prev] - v[j]);
      prev = j;
    }
    return static_cast<double>(n);  // unreachable: the minimum lies below half
  };
  return std::min(walk(+1) + walk(-1), static_cast<double>(n));
}

LocalizationEstimates localization_estimates(const SawtoothParams& p) {
  const double d = p.diffusion();
  return {p.kick_strength(), p.period(), d, d, d, d < 1.0};
}

double von_neumann_entropy(const DensityState& rho) {
  const ComplexMatrix& m = rho.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double lambda = eig.eigenvalues()(k);
    if (lambda > 1e-14) s -= lambda * std::log2(lambda);
  }
  return s;
}

}  // namespace qsaw
