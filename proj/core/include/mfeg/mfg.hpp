#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfeg/errors.hpp"
#include "mfeg/fpk.hpp"
#include "mfeg/grid.hpp"
#include "mfeg/hjb.hpp"
#include "mfeg/model.hpp"

namespace mfeg {

enum class InitialGuess { zero, static_nash_level };

const char* to_string(InitialGuess guess);

/// Damped Picard iteration on the interference trajectory.
///
/// The first pass plays the exact best response; every later pass plays the proximal
/// relaxed best response anchored on the previous policy, with `prox_weight` scaling the
/// anchor (see ProxAnchor).
struct FixedPointConfig {
  double damping = 0.5;      // omega in (0, 1]
  double tolerance = 1e-6;   // on sup|I' - I| / max(1, sup I)
  int max_iterations = 200;
  InitialGuess initial_guess = InitialGuess::static_nash_level;
  double prox_weight = 0.1;
  /// Called with every transported density, including the last one.
  std::function<void(int iteration, const DensityTrajectory&)> observer;

  void validate() const;
};

/// Mutually consistent value, policy, density and interference.
///
/// `value` and `policy` are the best response to `interference`; `density` is the
/// population moved by `policy`, and the interference it regenerates differs from
/// `interference` by `residual` (relative sup norm).
struct EquilibriumSolution {
  Grid grid;
  ValueField value;
  PolicyField policy;    // mean power
  PolicyField on_power;  // power while transmitting (time sharing below the tangent power)
  DensityTrajectory density;
  InterferenceTrajectory interference;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// Raised when the fixed point does not settle within max_iterations.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, EquilibriumSolution last)
      : Error(what), last_(std::move(last)) {}

  const std::vector<double>& residual_history() const noexcept {
    return last_.residual_history;
  }
  /// Final iterate, for diagnostics only.
  const EquilibriumSolution& last_iterate() const noexcept { return last_; }

 private:
  EquilibriumSolution last_;
};

/// sup_n |next_n - current_n| / max(1, sup_n current_n).
double interference_residual(const InterferenceTrajectory& current,
                             const InterferenceTrajectory& next);

/// Interference used to seed the iteration.
InterferenceTrajectory initial_interference(const ModelParams& params,
                                            const EnergyDistribution& initial, const Grid& grid,
                                            InitialGuess guess);

/// Interference regenerated by one more HJB + FPK pass of the solver from the returned
/// solution (proximal response anchored on its policy).
InterferenceTrajectory best_response_interference(const EquilibriumSolution& solution,
                                                  const ModelParams& params,
                                                  const EnergyDistribution& initial,
                                                  const FixedPointConfig& config,
                                                  const TerminalReward& terminal = zero_reward);

/// Iterate HJB backward, FPK forward, regenerate the interference, damp, repeat.
/// Throws NonConvergenceError (carrying the residual history) after max_iterations.
EquilibriumSolution solve_mfg(const ModelParams& params, const EnergyDistribution& initial,
                              const Grid& grid, const FixedPointConfig& config,
                              const TerminalReward& terminal = zero_reward);

/// v(T, E0), linear between the two bracketing nodes; exact on a node.
double average_utility_at_start(const EquilibriumSolution& solution, double energy);

/// Total utility of transmitting at a constant `power` from energy E0 at time T until the
/// battery is empty or the horizon ends, against a frozen interference trajectory
/// (piecewise constant over the grid intervals, as the solvers see it).
double stationary_policy_utility(double power, double energy, const InterferenceTrajectory& interference,
                                 const Grid& grid, const ModelParams& params);

/// Result of solving the same game with several damping factors.
struct UniquenessReport {
  std::vector<double> dampings;
  std::vector<EquilibriumSolution> solutions;
  double max_gap = 0.0;   // largest pairwise interference_residual
  bool distinct = false;  // max_gap > 10 * tolerance
};

/// Solves once per damping value; all solutions are kept when they disagree.
UniquenessReport probe_uniqueness(const ModelParams& params, const EnergyDistribution& initial,
                                  const Grid& grid, const FixedPointConfig& config,
                                  std::span<const double> dampings,
                                  const TerminalReward& terminal = zero_reward);

}  // namespace mfeg
