#pragma once

// Localization observables computed from states and momentum distributions.

#include "qsaw/linalg.hpp"
#include "qsaw/params.hpp"

#include <cstddef>
#include <vector>

namespace qsaw {

/// Populations W_m over momentum labels m in [-N/2, N/2). Storage is by
/// computational index, idx = m + N/2.
class MomentumDistribution {
 public:
  static constexpr double kNegativeTol = 1e-10;
  static constexpr double kSumTol = 1e-8;

  explicit MomentumDistribution(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  int half() const { return static_cast<int>(values_.size() / 2); }
  double at_index(std::size_t idx) const { return values_[idx]; }
  double at_momentum(int m) const { return values_[static_cast<std::size_t>(m + half())]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Minimal signed distance from `m` to `origin` on a ring of `n` momentum
/// levels, in [-n/2, n/2).
int torus_delta(int m, int origin, int n);

enum class DistanceMetric { Torus, Absolute };

MomentumDistribution momentum_distribution(const DensityState& rho);

/// sum_m W_m d(m, origin)^2. The torus metric uses the minimal image; the
/// absolute metric uses |m - origin| with m taken from [-N/2, N/2).
double second_moment(const MomentumDistribution& w, int origin = 0,
                     DistanceMetric metric = DistanceMetric::Torus);

/// Baseline-relative full width at half maximum.
///
/// The peak is argmax W (ties go to the label nearest m = 0, then to the
/// smaller label). The half level is baseline + (peak - baseline)/2 where the
/// baseline is min W, so adding a uniform offset never changes the width.
/// Crossings are located by linear interpolation while walking outwards from
/// the peak around the torus. A flat distribution returns N.
double fwhm(const MomentumDistribution& w);

double baseline_offset(const MomentumDistribution& w);

struct LocalizationEstimates {
  double kick_strength;   // k
  double period;          // T
  double diffusion;       // D
  double onset;           // t*, taken equal to D
  double length;          // theoretical localization length, also D
  bool perturbative;      // t* < 1: localized after the first iteration
};

LocalizationEstimates localization_estimates(const SawtoothParams& p);

/// -sum lambda log2 lambda over eigenvalues above 1e-14.
double von_neumann_entropy(const DensityState& rho);

}  // namespace qsaw
