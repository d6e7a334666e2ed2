#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "mfeg/fpk.hpp"
#include "mfeg/grid.hpp"
#include "mfeg/mfg.hpp"
#include "mfeg/model.hpp"

namespace mfeg {

struct PlayerState {
  double energy = 0.0;  // J
  std::complex<double> channel{1.0, 0.0};
  bool alive = false;   // energy > 0
};

/// What a player does during one step: radiate `power` with probability `duty`.
/// duty < 1 realises a time-shared (relaxed) control.
struct PowerDecision {
  double power = 0.0;
  double duty = 1.0;
};

/// Homogeneous state feedback (t, E, h) -> decision.
using PowerPolicy = std::function<PowerDecision(double t, double energy, std::complex<double> h)>;

enum class PolicySource { mfg_solution, static_nash, repeated_op, constant };

const char* to_string(PolicySource source);

struct SimConfig {
  std::size_t players = 50;          // K
  double processing_gain = 50.0;     // N
  double dt = 1.0 / 60.0;            // s
  double t_start = 0.0;
  double t_end = 20.0;
  std::uint64_t seed = 1;
  std::size_t replications = 20;
  PolicySource source = PolicySource::mfg_solution;
  double constant_power = 0.0;       // W, for PolicySource::constant
  std::complex<double> channel_mean{1.0, 0.0};     // mu
  double channel_noise = 0.0;                      // eta; 0 freezes the channel
  std::complex<double> channel_start{1.0, 0.0};    // h at T

  std::size_t steps() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Draws an initial energy from the player's own stream.
using EnergySampler = std::function<double(std::mt19937_64&)>;

/// Samples the energy nodes with the probabilities of `distribution` (absorbed mass maps to
/// an empty battery).
EnergySampler node_sampler(const EnergyDistribution& distribution, const Grid& grid);

struct ReplicationResult {
  std::vector<double> initial_energy;
  std::vector<double> final_energy;
  std::vector<double> utility;       // bits, per player
  std::vector<double> interference;  // player-averaged I_k per step
};

struct SimulationResult {
  std::vector<ReplicationResult> replications;

  double mean_utility() const;
};

/// (1/N) sum_{j != k} p_j |h_j|^2 for every k.
std::vector<double> empirical_interference(std::span<const PlayerState> states,
                                           std::span<const double> powers,
                                           double processing_gain);

/// Random stream owned by (seed, replication, stream id).
std::mt19937_64 player_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream);

/// One replication from explicit initial states; player k draws from stream_ids[k].
ReplicationResult simulate_players(const SimConfig& config, const ModelParams& params,
                                   const PowerPolicy& policy, std::vector<PlayerState> initial,
                                   std::span<const std::uint64_t> stream_ids,
                                   std::uint64_t replication);

/// All replications; player k of replication r uses stream (seed, r, k) both for its
/// initial energy and for its noise.
SimulationResult simulate(const SimConfig& config, const ModelParams& params,
                          const PowerPolicy& policy, const EnergySampler& sampler);

/// Time average of |player-averaged I_k - reference_n|, averaged over replications.
/// The reference is indexed by simulation step.
double mean_interference_error(const SimulationResult& result,
                               const InterferenceTrajectory& reference);

/// Mean-field policy read off a solved equilibrium, bilinear in (t, E).
PowerPolicy mfg_policy(const EquilibriumSolution& solution);

/// Static equilibrium power for the current channel gain, ignoring energy.
PowerPolicy static_policy(const StaticEquilibrium& beta, const ModelParams& params);

PowerPolicy constant_policy(double watts);

}  // namespace mfeg
