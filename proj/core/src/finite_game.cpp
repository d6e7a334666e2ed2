#include "mfeg/finite_game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfeg/errors.hpp"
#include "mfeg/parallel.hpp"

namespace mfeg {

namespace {

enum class StreamPurpose : std::uint32_t { dynamics = 0, initial_energy = 1 };

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream,
                            StreamPurpose purpose) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed),   hi(seed),   lo(replication),
                    hi(replication), lo(stream), hi(stream),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

// Linear weight of the upper neighbour, snapping values within 1e-9 of a node.
std::pair<std::size_t, double> locate(double x, std::size_t last) {
  if (!(x > 0.0)) return {0, 0.0};
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9) x = r;
  if (x >= static_cast<double>(last)) return {last, 0.0};
  const auto k = static_cast<std::size_t>(x);
  return {k, x - static_cast<double>(k)};
}

}  // namespace

const char* to_string(PolicySource source) {
  switch (source) {
    case PolicySource::mfg_solution:
      return "mfg_solution";
    case PolicySource::static_nash:
      return "static_nash";
    case PolicySource::repeated_op:
      return "repeated_op";
    case PolicySource::constant:
      return "constant";
  }
  return "unknown";
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
}

void SimConfig::validate() const {
  if (players < 1) throw ConfigError("simulation: need at least one player");
  if (!(processing_gain >= 1.0)) throw ConfigError("simulation: processing gain must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("simulation: dt must be positive");
  if (!(t_end > t_start)) throw ConfigError("simulation: empty horizon");
  if (replications < 1) throw ConfigError("simulation: need at least one replication");
  if (channel_noise < 0.0) throw ConfigError("simulation: channel noise must be non-negative");
  if (constant_power < 0.0) throw ConfigError("simulation: constant power must be non-negative");
}

EnergySampler node_sampler(const EnergyDistribution& distribution, const Grid& grid) {
  std::vector<double> cdf(distribution.mass.size());
  double acc = distribution.absorbed;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += distribution.mass[i];
    cdf[i] = acc;
  }
  const double total = acc;
  return [cdf = std::move(cdf), total, grid](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, total);
    const double x = u(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    return grid.energy(i);
  };
}

double SimulationResult::mean_utility() const {
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& r : replications) {
    acc = std::accumulate(r.utility.begin(), r.utility.end(), acc);
    count += r.utility.size();
  }
  return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

std::vector<double> empirical_interference(std::span<const PlayerState> states,
                                           std::span<const double> powers,
                                           double processing_gain) {
  if (states.size() != powers.size()) {
    throw DomainError("empirical_interference: states and powers differ in length");
  }
  std::vector<double> received(states.size());
  double total = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    received[k] = powers[k] * std::norm(states[k].channel);
    total += received[k];
  }
  std::vector<double> out(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double others = std::max(0.0, total - received[k]);
    out[k] = others / processing_gain;
  }
  return out;
}

std::mt19937_64 player_stream(std::uint64_t seed, std::uint64_t replication,
                              std::uint64_t stream) {
  return make_stream(seed, replication, stream, StreamPurpose::dynamics);
}

ReplicationResult simulate_players(const SimConfig& config, const ModelParams& params,
                                   const PowerPolicy& policy, std::vector<PlayerState> states,
                                   std::span<const std::uint64_t> stream_ids,
                                   std::uint64_t replication) {
  config.validate();
  if (stream_ids.size() != states.size()) {
    throw ConfigError("simulate_players: one stream id per player is required");
  }
  const std::size_t k_players = states.size();
  const std::size_t steps = config.steps();
  const double dt = config.dt;
  const double eta = config.channel_noise;

  std::vector<std::mt19937_64> rng;
  rng.reserve(k_players);
  for (std::uint64_t id : stream_ids) rng.push_back(player_stream(config.seed, replication, id));

  ReplicationResult out;
  out.initial_energy.resize(k_players);
  out.utility.assign(k_players, 0.0);
  out.interference.resize(steps);
  for (std::size_t k = 0; k < k_players; ++k) {
    states[k].energy = std::max(0.0, states[k].energy);
    states[k].alive = states[k].energy > 0.0;
    out.initial_energy[k] = states[k].energy;
  }

  std::vector<double> powers(k_players);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::normal_distribution<double>> normal(k_players);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = config.t_start + static_cast<double>(n) * dt;
    for (std::size_t k = 0; k < k_players; ++k) {
      const double draw = coin(rng[k]);
      powers[k] = 0.0;
      if (!states[k].alive) continue;
      const PowerDecision d = policy(t, states[k].energy, states[k].channel);
      if (d.power > 0.0 && draw < d.duty) powers[k] = std::min(d.power, params.p_max);
    }
    const std::vector<double> interference =
        empirical_interference(states, powers, config.processing_gain);
    double mean_interference = 0.0;
    for (std::size_t k = 0; k < k_players; ++k) {
      mean_interference += interference[k];
      const double p = powers[k];
      if (p > 0.0) {
        const double gain = std::norm(states[k].channel);
        const double gamma = sinr(p, gain, interference[k], params.noise_power);
        out.utility[k] += energy_efficiency(p, gamma, params) * dt;
        states[k].energy = std::max(0.0, states[k].energy - p * dt);
        states[k].alive = states[k].energy > 0.0;
      }
      if (eta > 0.0) {
        const double dw_re = normal[k](rng[k]);
        const double dw_im = normal[k](rng[k]);
        const std::complex<double> drift = 0.5 * (config.channel_mean - states[k].channel);
        states[k].channel += drift * dt + eta * std::sqrt(dt) * std::complex<double>(dw_re, dw_im);
      }
    }
    out.interference[n] = mean_interference / static_cast<double>(k_players);
  }
  out.final_energy.resize(k_players);
  for (std::size_t k = 0; k < k_players; ++k) out.final_energy[k] = states[k].energy;
  return out;
}

SimulationResult simulate(const SimConfig& config, const ModelParams& params,
                          const PowerPolicy& policy, const EnergySampler& sampler) {
  config.validate();
  SimulationResult result;
  result.replications.resize(config.replications);
  std::vector<std::uint64_t> ids(config.players);
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});

  const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::size_t r = 0; r < config.replications; ++r) {
    std::vector<PlayerState> states(config.players);
    for (std::size_t k = 0; k < config.players; ++k) {
      auto rng = make_stream(config.seed, r, k, StreamPurpose::initial_energy);
      states[k].energy = sampler(rng);
      states[k].channel = config.channel_start;
    }
    result.replications[r] = simulate_players(config, params, policy, std::move(states), ids, r);
  }
  return result;
}

double mean_interference_error(const SimulationResult& result,
                               const InterferenceTrajectory& reference) {
  double acc = 0.0;
  for (const auto& r : result.replications) {
    if (r.interference.size() != reference.size()) {
      throw DomainError("mean_interference_error: reference does not match the step count");
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < reference.size(); ++n) {
      sum += std::abs(r.interference[n] - reference[n]);
    }
    acc += sum / static_cast<double>(reference.size());
  }
  return result.replications.empty() ? 0.0
                                      : acc / static_cast<double>(result.replications.size());
}

PowerPolicy mfg_policy(const EquilibriumSolution& solution) {
  const Grid grid = solution.grid;
  const PolicyField mean = solution.policy;
  const PolicyField on = solution.on_power;
  return [grid, mean, on](double t, double energy, std::complex<double>) {
    const auto [n, wt] = locate((t - grid.t_start) / grid.dt(), grid.n_time - 1);
    const auto [i, we] = locate(energy / grid.dE(), grid.n_energy);
    auto bilinear = [&](const PolicyField& f) {
      const std::size_t n1 = std::min(n + 1, grid.n_time - 1);
      const std::size_t i1 = std::min(i + 1, grid.n_energy);
      return (1.0 - wt) * ((1.0 - we) * f(n, i) + we * f(n, i1)) +
             wt * ((1.0 - we) * f(n1, i) + we * f(n1, i1));
    };
    const double m = bilinear(mean);
    const double p = bilinear(on);
    if (!(m > 0.0) || !(p > 0.0)) return PowerDecision{0.0, 1.0};
    if (m >= p) return PowerDecision{m, 1.0};
    return PowerDecision{p, m / p};
  };
}

PowerPolicy static_policy(const StaticEquilibrium& beta, const ModelParams& params) {
  return [beta, params](double, double, std::complex<double> h) {
    const double gain = std::norm(h);
    if (gain == 0.0) return PowerDecision{0.0, 1.0};
    return PowerDecision{equilibrium_power(gain, beta, params).watts, 1.0};
  };
}

PowerPolicy constant_policy(double watts) {
  return [watts](double, double, std::complex<double>) { return PowerDecision{watts, 1.0}; };
}

}  // namespace mfeg
