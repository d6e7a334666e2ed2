#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mfeg/model.hpp"

namespace mfeg {

/// Drift discretization of the OU transport.
enum class DriftScheme {
  exponential_fitting,  // Scharfetter-Gummel flux; exact on point-sampled stationary Gaussians
  upwind,               // first-order donor cell, diffusion added separately
};

const char* to_string(DriftScheme scheme);

/// Square grid of cells over Re(h), Im(h) in [-half_width, half_width].
struct ChannelGrid {
  double half_width = 4.0;
  std::size_t cells = 100;  // per axis
  double dt = 0.004;
  DriftScheme scheme = DriftScheme::exponential_fitting;

  double dh() const noexcept { return 2.0 * half_width / static_cast<double>(cells); }
  double center(std::size_t j) const noexcept {
    return -half_width + (static_cast<double>(j) + 0.5) * dh();
  }
  /// Throws ConfigError on an empty grid, dt > dh^2 / (2 eta^2) or a scheme that
  /// would produce negative mass at this (mu, eta).
  void validate(std::complex<double> mu, double eta) const;
};

/// Cell-integrated probabilities on a ChannelGrid, indexed [re * cells + im].
struct ChannelDensity {
  std::size_t cells = 0;
  std::vector<double> mass;

  double& at(std::size_t re, std::size_t im) { return mass[re * cells + im]; }
  double at(std::size_t re, std::size_t im) const { return mass[re * cells + im]; }
  double total() const;
  std::complex<double> mean(const ChannelGrid& grid) const;
  /// E|h - about|^2 on the cell centres.
  double second_moment(const ChannelGrid& grid, std::complex<double> about) const;
  /// Mass held by the outermost ring of cells.
  double boundary_mass() const;
};

/// Half the L1 distance.
double total_variation(const ChannelDensity& a, const ChannelDensity& b);

/// All mass in the cell containing h0 (clamped to the grid).
ChannelDensity point_mass(const ChannelGrid& grid, std::complex<double> h0);

/// Cell-integrated Gaussian centred at mu with variance eta^2 per real component.
/// Throws DomainError for eta <= 0.
ChannelDensity stationary_channel_density(std::complex<double> mu, double eta,
                                          const ChannelGrid& grid);

struct ChannelTrajectory {
  std::vector<double> times;
  std::vector<ChannelDensity> slices;
  double max_boundary_mass = 0.0;
  double max_mass_defect = 0.0;  // max |total - 1| over the run
};

/// Explicit scheme for  m_t + div(m (mu - h) / 2) = (eta^2 / 2) Lap m  with zero flux
/// through the outer boundary. Slices are kept every `stride` steps and at the end.
ChannelTrajectory ou_fpk_forward(std::complex<double> mu, double eta,
                                 const ChannelDensity& initial, const ChannelGrid& grid,
                                 double duration, std::size_t stride = 100);

/// Static Nash power control per channel state with the closed-form interference.
struct ChannelPolicy {
  double interference = 0.0;  // W
  double beta = 0.0;          // SINR target
  std::vector<double> power;  // per cell, clamped to p_max
  std::size_t clamped_cells = 0;
};

/// Power for channel gain |h|^2 under the channel-regime equilibrium.
double channel_regime_power(double gain, const StaticEquilibrium& beta, const ModelParams& params);

/// Throws InfeasibleError when theta beta* >= 1 and DomainError when the slice is not
/// normalized within 1e-6.
ChannelPolicy channel_regime_policy(const ChannelDensity& slice, const ChannelGrid& grid,
                                    const ModelParams& params);

}  // namespace mfeg
