#include "mfeg/fpk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfeg/errors.hpp"
#include "mfeg/parallel.hpp"

namespace mfeg {

double EnergyDistribution::total() const {
  return std::accumulate(mass.begin(), mass.end(), 0.0) + absorbed;
}

EnergyDistribution uniform_distribution(const Grid& grid) {
  EnergyDistribution out;
  out.mass.assign(grid.n_energy + 1, 1.0 / static_cast<double>(grid.n_energy));
  out.mass[0] = 0.0;
  return out;
}

EnergyDistribution threshold_distribution(const Grid& grid, double threshold) {
  EnergyDistribution out;
  out.mass.assign(grid.n_energy + 1, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 1; i <= grid.n_energy; ++i) {
    // Slack keeps a threshold that lands on a node from admitting that node by rounding.
    if (grid.energy(i) > threshold + 1e-9 * grid.dE()) {
      out.mass[i] = 1.0;
      ++count;
    }
  }
  if (count == 0) {
    throw ConfigError("threshold distribution: no energy node above " +
                      std::to_string(threshold));
  }
  for (double& m : out.mass) {
    m /= static_cast<double>(count);
  }
  return out;
}

double DensityTrajectory::total(std::size_t n) const {
  const auto r = row(n);
  return std::accumulate(r.begin(), r.end(), 0.0) + absorbed_[n];
}

double DensityTrajectory::mean_energy(std::size_t n, const Grid& grid) const {
  const auto r = row(n);
  double acc = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    acc += r[i] * grid.energy(i);
  }
  return acc;
}

DensityTrajectory fpk_forward(const PolicyField& policy, const EnergyDistribution& initial,
                              const Grid& grid) {
  const std::size_t nE = grid.n_energy;
  const std::size_t nT = grid.n_time;
  if (policy.rows() != nT || policy.cols() != nE + 1) {
    throw ConfigError("fpk_forward: policy shape does not match the grid");
  }
  if (initial.mass.size() != nE + 1) {
    throw ConfigError("fpk_forward: initial distribution has " +
                      std::to_string(initial.mass.size()) + " nodes, expected " +
                      std::to_string(nE + 1));
  }
  if (initial.mass[0] != 0.0) {
    throw ConfigError("fpk_forward: initial mass at E = 0 belongs in the absorbed account");
  }
  for (double m : initial.mass) {
    if (m < 0.0 || !std::isfinite(m)) {
      throw ConfigError("fpk_forward: initial distribution has a negative or non-finite cell");
    }
  }
  if (std::abs(initial.total() - 1.0) > kMassTolerance) {
    throw ConfigError("fpk_forward: initial distribution sums to " +
                      std::to_string(initial.total()));
  }

  const double ratio = grid.dt() / grid.dE();
  DensityTrajectory out(nT, nE);
  std::copy(initial.mass.begin(), initial.mass.end(), out.row(0).begin());
  out.absorbed(0) = initial.absorbed;

  std::vector<double> outflow(nE + 2, 0.0);
  const int threads = thread_count();
  for (std::size_t n = 0; n < nT; ++n) {
    const auto cur = out.row(n);
    const auto p = policy.row(n);
    auto nxt = out.row(n + 1);

#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::size_t i = 1; i <= nE; ++i) {
      const double fraction = std::min(std::max(p[i], 0.0) * ratio, 1.0);
      outflow[i] = cur[i] * fraction;
    }
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::size_t i = 1; i <= nE; ++i) {
      nxt[i] = cur[i] - outflow[i] + outflow[i + 1];
    }
    nxt[0] = 0.0;
    out.absorbed(n + 1) = out.absorbed(n) + outflow[1];

    for (std::size_t i = 1; i <= nE; ++i) {
      if (nxt[i] < 0.0) {
        throw ConsistencyError("fpk_forward: negative mass at step " + std::to_string(n + 1));
      }
    }
    const double defect = std::abs(out.total(n + 1) - 1.0);
    if (defect > kMassTolerance) {
      throw ConsistencyError("fpk_forward: mass defect " + std::to_string(defect) +
                             " at step " + std::to_string(n + 1));
    }
  }
  return out;
}

double interference_of(std::span<const double> mass_row, std::span<const double> policy_row,
                       const ModelParams& params) {
  if (mass_row.size() != policy_row.size()) {
    throw DomainError("interference_of: density and policy rows differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < mass_row.size(); ++i) {
    acc += mass_row[i] * policy_row[i];
  }
  return params.load * params.channel_gain_mean * acc;
}

InterferenceTrajectory interference_trajectory(const DensityTrajectory& density,
                                               const PolicyField& policy,
                                               const ModelParams& params) {
  InterferenceTrajectory out;
  out.watts.resize(policy.rows());
  for (std::size_t n = 0; n < policy.rows(); ++n) {
    out.watts[n] = interference_of(density.row(n), policy.row(n), params);
  }
  return out;
}

}  // namespace mfeg
