#pragma once

#include <functional>

#include "mfeg/grid.hpp"
#include "mfeg/model.hpp"

namespace mfeg {

/// Lower end of the interior search interval of the Hamiltonian, W.
inline constexpr double kMinSearchPower = 1e-9;

/// Golden-section iterations of the inner maximization.
inline constexpr int kGoldenIterations = 80;

struct HamiltonianPoint {
  double value = 0.0;  // H, bit/s
  double power = 0.0;  // maximizer, W
};

/// phi(p) = R f(p g / (sigma^2 + I)) / p - p * shadow_price, with phi(0) = 0.
double hamiltonian_objective(double power, double shadow_price, double interference,
                             double gain, const ModelParams& params);

/// d phi / dp from the analytic derivative of the success function.
double hamiltonian_slope(double power, double shadow_price, double interference, double gain,
                         const ModelParams& params);

/// sup of phi over [0, p_max].
///
/// Golden-section search on [kMinSearchPower, p_max], a bracketed secant polish of the
/// first-order condition around the golden point, then comparison against the boundary
/// values phi(0) = 0 and phi(p_max). The shadow price may be of either sign.
HamiltonianPoint hamiltonian_argmax(double shadow_price, double interference, double gain,
                                    const ModelParams& params);

/// Concave envelope of the flow utility u(p) = R f(p g / (sigma^2 + I)) / p near p = 0.
///
/// Below `tangent_power` the envelope is the chord `slope * p`, realised by transmitting
/// at `tangent_power` for a fraction p / tangent_power of the time (time sharing);
/// above it the envelope is u itself.
struct RelaxedUtility {
  double tangent_power = 0.0;  // argmax of u(p) / p over (0, p_max]
  double slope = 0.0;          // u(tangent_power) / tangent_power, bit/J
  double rate = 0.0;
  double coupling = 0.0;       // g / (sigma^2 + I)
  const SuccessFunction* success = nullptr;

  /// Envelope value at mean power p.
  double operator()(double mean_power) const;
  /// Power actually radiated while on, for a mean power p.
  double on_power(double mean_power) const;
};

RelaxedUtility relaxed_utility(double interference, double gain, const ModelParams& params);

using TerminalReward = std::function<double(double energy)>;

inline double zero_reward(double) { return 0.0; }

struct HjbSolution {
  ValueField value;
  PolicyField policy;    // mean power
  PolicyField on_power;  // power while transmitting; equals `policy` unless time sharing
};

/// Proximal anchoring of the relaxed best response on a previous policy.
///
/// At each node the mean power maximizes
///   envelope(p) - shadow_price * p - (weight * slope / tangent_power / 2) (p - p_prev)^2,
/// which is continuous in the interference and the shadow price. A policy that reproduces
/// its own anchor is an exact best response.
struct ProxAnchor {
  const PolicyField* previous = nullptr;
  double weight = 1.0;
};

/// Explicit upwind sweep of  v_t + sup_p { u(p, I(t)) - p v_E } = 0  from T' back to T.
///
/// Shadow price at node i is the one-sided difference (v_i - v_{i-1}) / dE, which makes
/// each step the dynamic-programming update of the controlled chain that moves one energy
/// node down with probability p dt / dE. Node 0 (empty battery) never transmits.
/// Throws ConfigError on a CFL violation or a trajectory of the wrong length.
HjbSolution solve_hjb_backward(const InterferenceTrajectory& interference, const Grid& grid,
                               const TerminalReward& terminal, const ModelParams& params);

/// Same sweep with the proximal relaxed response at every node (see ProxAnchor). The value
/// is that of the returned policy.
HjbSolution solve_hjb_backward(const InterferenceTrajectory& interference, const Grid& grid,
                               const TerminalReward& terminal, const ModelParams& params,
                               const ProxAnchor& anchor);

}  // namespace mfeg
