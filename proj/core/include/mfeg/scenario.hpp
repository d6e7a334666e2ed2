#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mfeg/channel.hpp"
#include "mfeg/finite_game.hpp"
#include "mfeg/fpk.hpp"
#include "mfeg/grid.hpp"
#include "mfeg/mfg.hpp"
#include "mfeg/model.hpp"

namespace mfeg {

enum class Regime { quasi_static, channel, finite_sim, baselines };

const char* to_string(Regime regime);

/// Initial energy law m_T.
struct InitialSpec {
  enum class Kind { uniform, threshold };
  Kind kind = Kind::uniform;
  double threshold = 0.0;  // J; mass only strictly above it

  EnergyDistribution build(const Grid& grid) const;
  std::string describe() const;
};

struct ChannelSettings {
  std::complex<double> mu{0.0, 0.0};
  double eta = 0.70710678118654752;  // 1/sqrt(2): E|h|^2 = 1 at stationarity
  ChannelGrid grid;
  double duration = 0.0;             // 0: the model horizon
  enum class Start { stationary, point } start = Start::stationary;
  std::complex<double> start_point{0.0, 0.0};
  std::size_t stride = 250;
};

struct SimSettings {
  std::vector<std::size_t> players{50, 200, 800};  // K; N = K / theta
  std::size_t replications = 20;
  PolicySource policy = PolicySource::mfg_solution;
  double constant_power = 0.0;
  double channel_noise = 0.0;
  std::complex<double> channel_mean{1.0, 0.0};
};

/// One experiment: everything needed to reproduce a run.
struct Scenario {
  std::string name;
  Regime regime = Regime::quasi_static;
  std::string plot;  // quantity the data is meant for, free text
  ModelParams params;
  std::size_t n_energy = 200;
  std::size_t n_time = 0;  // 0: smallest count meeting the CFL margin
  double cfl_margin = 1.2;
  std::size_t output_stride = 1;  // time stride of policy.csv / density.csv rows
  InitialSpec initial;
  FixedPointConfig fixed_point;
  ChannelSettings channel;
  SimSettings simulation;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";

  Grid grid() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Reads a scenario file; throws ConfigError naming the first missing required field or
/// the first malformed value.
Scenario load_scenario(const std::filesystem::path& file);

/// Same grammar from an in-memory string.
Scenario parse_scenario(const std::string& text);

/// The six rows of the reference experiment matrix, named fig1..fig6.
std::vector<Scenario> builtin_scenarios();

/// Built-ins followed by every *.ini scenario in `user_dir` (sorted by file name).
/// Unreadable files are skipped.
std::vector<Scenario> list_scenarios(const std::filesystem::path& user_dir = {});

}  // namespace mfeg
