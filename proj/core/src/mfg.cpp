#include "mfeg/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace mfeg {

const char* to_string(InitialGuess guess) {
  switch (guess) {
    case InitialGuess::zero:
      return "zero";
    case InitialGuess::static_nash_level:
      return "static_nash_level";
  }
  return "unknown";
}

void FixedPointConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw ConfigError("fixed point: damping must lie in (0, 1]");
  }
  if (!(tolerance > 0.0)) {
    throw ConfigError("fixed point: tolerance must be positive");
  }
  if (!(prox_weight > 0.0)) {
    throw ConfigError("fixed point: prox_weight must be positive");
  }
  if (max_iterations < 1) {
    throw ConfigError("fixed point: max_iterations must be at least 1");
  }
}

double interference_residual(const InterferenceTrajectory& current,
                             const InterferenceTrajectory& next) {
  if (current.size() != next.size()) {
    throw DomainError("interference_residual: trajectories differ in length");
  }
  double diff = 0.0;
  double scale = 1.0;
  for (std::size_t n = 0; n < current.size(); ++n) {
    diff = std::max(diff, std::abs(next[n] - current[n]));
    scale = std::max(scale, current[n]);
  }
  return diff / scale;
}

InterferenceTrajectory initial_interference(const ModelParams& params,
                                            const EnergyDistribution& initial, const Grid& grid,
                                            InitialGuess guess) {
  if (guess == InitialGuess::zero) {
    return InterferenceTrajectory::constant(grid.n_time, 0.0);
  }
  double level = 0.0;
  try {
    const StaticEquilibrium beta =
        solve_beta(EquilibriumMode::static_nash, params.load, params.success);
    if (beta.valid) {
      const double theta_beta = params.load * beta.beta;
      level = theta_beta * params.noise_power / (1.0 - theta_beta) * (1.0 - initial.absorbed);
    }
  } catch (const RootFindingError&) {
    level = 0.0;
  }
  level = std::min(level, params.load * params.channel_gain_mean * params.p_max);
  return InterferenceTrajectory::constant(grid.n_time, level);
}

namespace {

struct Pass {
  HjbSolution hjb;
  DensityTrajectory density;
  InterferenceTrajectory regenerated;
};

Pass run_pass(const InterferenceTrajectory& interference, const ModelParams& params,
              const EnergyDistribution& initial, const Grid& grid,
              const TerminalReward& terminal, const ProxAnchor* anchor) {
  Pass pass;
  pass.hjb = anchor == nullptr ? solve_hjb_backward(interference, grid, terminal, params)
                               : solve_hjb_backward(interference, grid, terminal, params, *anchor);
  pass.density = fpk_forward(pass.hjb.policy, initial, grid);
  pass.regenerated = interference_trajectory(pass.density, pass.hjb.policy, params);
  return pass;
}

void check_inputs(const ModelParams& params, const EnergyDistribution& initial,
                  const Grid& grid) {
  params.validate();
  grid.validate(params);
  if (initial.mass.size() != grid.n_energy + 1) {
    throw ConfigError("initial distribution does not match the energy grid");
  }
  if (std::abs(initial.total() - 1.0) > kMassTolerance) {
    throw ConfigError("initial distribution is not normalized");
  }
}

}  // namespace

InterferenceTrajectory best_response_interference(const EquilibriumSolution& solution,
                                                  const ModelParams& params,
                                                  const EnergyDistribution& initial,
                                                  const FixedPointConfig& config,
                                                  const TerminalReward& terminal) {
  check_inputs(params, initial, solution.grid);
  const ProxAnchor anchor{&solution.policy, config.prox_weight};
  return run_pass(solution.interference, params, initial, solution.grid, terminal, &anchor)
      .regenerated;
}

EquilibriumSolution solve_mfg(const ModelParams& params, const EnergyDistribution& initial,
                              const Grid& grid, const FixedPointConfig& config,
                              const TerminalReward& terminal) {
  check_inputs(params, initial, grid);
  config.validate();

  InterferenceTrajectory current =
      initial_interference(params, initial, grid, config.initial_guess);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.max_iterations));

  PolicyField previous;
  for (int iteration = 1;; ++iteration) {
    const ProxAnchor anchor{&previous, config.prox_weight};
    Pass pass = run_pass(current, params, initial, grid, terminal,
                         iteration == 1 ? nullptr : &anchor);
    if (config.observer) config.observer(iteration, pass.density);
    const double residual = interference_residual(current, pass.regenerated);
    history.push_back(residual);

    const bool done = residual <= config.tolerance;
    if (done || iteration >= config.max_iterations) {
      EquilibriumSolution out;
      out.grid = grid;
      out.value = std::move(pass.hjb.value);
      out.policy = std::move(pass.hjb.policy);
      out.on_power = std::move(pass.hjb.on_power);
      out.density = std::move(pass.density);
      out.interference = std::move(current);
      out.iterations = iteration;
      out.residual = residual;
      out.residual_history = std::move(history);
      if (done) {
        return out;
      }
      throw NonConvergenceError("solve_mfg: no fixed point after " +
                                    std::to_string(iteration) + " iterations, residual " +
                                    std::to_string(residual),
                                std::move(out));
    }

    previous = std::move(pass.hjb.policy);
    const double w = config.damping;
    for (std::size_t n = 0; n < current.size(); ++n) {
      current.watts[n] = (1.0 - w) * current.watts[n] + w * pass.regenerated.watts[n];
    }
  }
}

double average_utility_at_start(const EquilibriumSolution& solution, double energy) {
  const Grid& grid = solution.grid;
  if (!(energy >= 0.0 && energy <= grid.energy_max)) {
    throw DomainError("average_utility_at_start: E0 = " + std::to_string(energy) +
                      " outside [0, E_max]");
  }
  const double x = energy / grid.dE();
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, x)) {
    return solution.value(0, static_cast<std::size_t>(nearest));
  }
  const auto i = std::min(static_cast<std::size_t>(x), grid.n_energy - 1);
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * solution.value(0, i) + w * solution.value(0, i + 1);
}

double stationary_policy_utility(double power, double energy,
                                 const InterferenceTrajectory& interference, const Grid& grid,
                                 const ModelParams& params) {
  if (power < 0.0 || energy < 0.0) {
    throw DomainError("stationary_policy_utility: negative power or energy");
  }
  if (interference.size() != grid.n_time) {
    throw DomainError("stationary_policy_utility: trajectory does not match the grid");
  }
  if (power == 0.0) {
    return 0.0;
  }
  const double dt = grid.dt();
  double remaining = energy;
  double total = 0.0;
  for (std::size_t n = 0; n < grid.n_time && remaining > 0.0; ++n) {
    const double active = std::min(dt, remaining / power);
    const double gamma =
        sinr(power, params.channel_gain_mean, interference[n], params.noise_power);
    total += energy_efficiency(power, gamma, params) * active;
    remaining -= power * active;
  }
  return total;
}

UniquenessReport probe_uniqueness(const ModelParams& params, const EnergyDistribution& initial,
                                  const Grid& grid, const FixedPointConfig& config,
                                  std::span<const double> dampings,
                                  const TerminalReward& terminal) {
  UniquenessReport report;
  for (double w : dampings) {
    FixedPointConfig c = config;
    c.damping = w;
    report.dampings.push_back(w);
    report.solutions.push_back(solve_mfg(params, initial, grid, c, terminal));
  }
  for (std::size_t a = 0; a < report.solutions.size(); ++a) {
    for (std::size_t b = a + 1; b < report.solutions.size(); ++b) {
      report.max_gap = std::max(report.max_gap,
                                interference_residual(report.solutions[a].interference,
                                                      report.solutions[b].interference));
    }
  }
  report.distinct = report.max_gap > 10.0 * config.tolerance;
  return report;
}

}  // namespace mfeg
