#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfeg/grid.hpp"
#include "mfeg/model.hpp"

namespace mfeg {

/// Probability distribution over the energy nodes.
///
/// `mass[i]` is the probability of holding E_i for i >= 1; `mass[0]` is kept at zero and
/// the empty-battery population lives in the separate `absorbed` account.
struct EnergyDistribution {
  std::vector<double> mass;
  double absorbed = 0.0;

  double total() const;
};

/// Uniform over the non-empty nodes E_1..E_max.
EnergyDistribution uniform_distribution(const Grid& grid);

/// Uniform over the nodes with E > threshold, zero below.
EnergyDistribution threshold_distribution(const Grid& grid, double threshold);

/// Energy distribution at every time node, t_0..t_{n_time}.
class DensityTrajectory {
 public:
  DensityTrajectory() = default;
  DensityTrajectory(std::size_t n_time, std::size_t n_energy)
      : mass_(n_time + 1, n_energy + 1), absorbed_(n_time + 1, 0.0) {}

  std::size_t time_nodes() const noexcept { return mass_.rows(); }
  std::size_t energy_nodes() const noexcept { return mass_.cols(); }

  double mass(std::size_t n, std::size_t i) const { return mass_(n, i); }
  double& mass(std::size_t n, std::size_t i) { return mass_(n, i); }
  std::span<const double> row(std::size_t n) const { return mass_.row(n); }
  std::span<double> row(std::size_t n) { return mass_.row(n); }

  double absorbed(std::size_t n) const { return absorbed_[n]; }
  double& absorbed(std::size_t n) { return absorbed_[n]; }

  /// sum of cell masses plus the absorbed account at time node n.
  double total(std::size_t n) const;
  /// sum_i m_i E_i at time node n.
  double mean_energy(std::size_t n, const Grid& grid) const;

  friend bool operator==(const DensityTrajectory&, const DensityTrajectory&) = default;

 private:
  TimeEnergyField mass_;
  std::vector<double> absorbed_;
};

/// Tolerance on |sum m + m0 - 1| enforced at every step.
inline constexpr double kMassTolerance = 1e-8;

/// Conservative upwind transport of  m_t - (m p*)_E = 0.
///
/// During step n, node i hands the fraction min(p_i dt / dE, 1) of its mass to node i-1;
/// whatever leaves node 1 is added to the absorbed account. Throws ConfigError on bad shapes
/// or an unnormalized initial distribution, ConsistencyError on a mass defect.
DensityTrajectory fpk_forward(const PolicyField& policy, const EnergyDistribution& initial,
                              const Grid& grid);

/// theta * E|h|^2 * sum_i m_i p_i; the absorbed mass transmits nothing.
double interference_of(std::span<const double> mass_row, std::span<const double> policy_row,
                       const ModelParams& params);

/// interference_of at every decision interval.
InterferenceTrajectory interference_trajectory(const DensityTrajectory& density,
                                               const PolicyField& policy,
                                               const ModelParams& params);

}  // namespace mfeg
