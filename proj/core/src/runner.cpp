#include "mfeg/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>

#include "json.hpp"
#include "mfeg/channel.hpp"
#include "mfeg/errors.hpp"
#include "mfeg/finite_game.hpp"
#include "mfeg/fpk.hpp"
#include "mfeg/mfg.hpp"

namespace mfeg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << format_number(v);
      first = false;
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      out_ << (k ? "," : "") << format_number(values[k]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Context {
  const Scenario& scenario;
  const RunOptions& options;
  fs::path dir;
  RunReport& report;

  fs::path file(const std::string& name) {
    report.files.push_back(dir / name);
    return dir / name;
  }

  void note(const std::string& line) const {
    if (!options.quiet && options.log) *options.log << line << '\n';
  }
};

struct Baselines {
  std::optional<StaticEquilibrium> static_nash;
  std::optional<StaticEquilibrium> repeated;
  double static_power = kNaN;
  double repeated_power = kNaN;
};

Baselines baselines(const ModelParams& params) {
  Baselines b;
  auto attempt = [&](EquilibriumMode mode, std::optional<StaticEquilibrium>& eq, double& power) {
    try {
      eq = solve_beta(mode, params.load, params.success);
      power = equilibrium_power(params.channel_gain_mean, *eq, params).watts;
    } catch (const RootFindingError&) {
    } catch (const InfeasibleError&) {
    }
  };
  attempt(EquilibriumMode::static_nash, b.static_nash, b.static_power);
  attempt(EquilibriumMode::repeated_operating_point, b.repeated, b.repeated_power);
  return b;
}

double baseline_utility(double power, double energy, const InterferenceTrajectory& interference,
                        const Grid& grid, const ModelParams& params) {
  if (std::isnan(power)) return kNaN;
  return stationary_policy_utility(power, energy, interference, grid, params);
}

json summary_base(const Scenario& s, const Grid& grid, const Baselines& b) {
  json j;
  j["scenario"] = s.name;
  j["regime"] = to_string(s.regime);
  j["horizon"] = s.params.horizon();
  j["initial_distribution"] = s.initial.describe();
  j["beta_star"] = b.static_nash ? json(b.static_nash->beta) : json(nullptr);
  j["beta_tilde"] = b.repeated ? json(b.repeated->beta) : json(nullptr);
  j["static_power"] = std::isnan(b.static_power) ? json(nullptr) : json(b.static_power);
  j["repeated_power"] = std::isnan(b.repeated_power) ? json(nullptr) : json(b.repeated_power);
  j["grid"] = {{"n_energy", grid.n_energy}, {"n_time", grid.n_time},
               {"dE", grid.dE()},           {"dt", grid.dt()}};
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::vector<std::size_t> time_rows(std::size_t count, std::size_t stride) {
  std::vector<std::size_t> rows;
  for (std::size_t n = 0; n < count; n += stride) rows.push_back(n);
  if (rows.empty() || rows.back() != count - 1) rows.push_back(count - 1);
  return rows;
}

struct MfgRun {
  EquilibriumSolution solution;
  bool converged = true;
};

MfgRun solve(const Scenario& s, const EnergyDistribution& initial, const Grid& grid) {
  try {
    return {solve_mfg(s.params, initial, grid, s.fixed_point), true};
  } catch (const NonConvergenceError& e) {
    return {e.last_iterate(), false};
  }
}

void write_mfg_files(Context& ctx, const MfgRun& run, const Baselines& b, json& summary) {
  const Scenario& s = ctx.scenario;
  const EquilibriumSolution& sol = run.solution;
  const Grid& grid = sol.grid;

  CsvWriter policy(ctx.file("policy.csv"), {"t", "E", "p"});
  for (std::size_t n : time_rows(grid.n_time, s.output_stride)) {
    for (std::size_t i = 1; i <= grid.n_energy; ++i) {
      policy.row({grid.time(n), grid.energy(i), sol.policy(n, i)});
    }
  }
  CsvWriter density(ctx.file("density.csv"), {"t", "E", "m", "m0"});
  for (std::size_t n : time_rows(grid.n_time + 1, s.output_stride)) {
    for (std::size_t i = 0; i <= grid.n_energy; ++i) {
      density.row({grid.time(n), grid.energy(i), sol.density.mass(n, i), sol.density.absorbed(n)});
    }
  }
  CsvWriter interference(ctx.file("interference.csv"), {"t", "I"});
  for (std::size_t n = 0; n < grid.n_time; ++n) {
    interference.row({grid.time(n), sol.interference[n]});
  }
  CsvWriter value(ctx.file("value_t0.csv"), {"E", "v_mfg", "u_static", "u_repeated"});
  for (std::size_t i = 0; i <= grid.n_energy; ++i) {
    const double e = grid.energy(i);
    value.row({e, sol.value(0, i),
               baseline_utility(b.static_power, e, sol.interference, grid, s.params),
               baseline_utility(b.repeated_power, e, sol.interference, grid, s.params)});
  }
  summary["converged"] = run.converged;
  summary["iterations"] = sol.iterations;
  summary["residual"] = sol.residual;
  summary["residual_history"] = sol.residual_history;
  summary["fixed_point"] = {{"damping", s.fixed_point.damping},
                            {"tolerance", s.fixed_point.tolerance},
                            {"max_iterations", s.fixed_point.max_iterations},
                            {"initial_guess", to_string(s.fixed_point.initial_guess)},
                            {"prox_weight", s.fixed_point.prox_weight}};
}

ExitCode run_quasi_static(Context& ctx, json& summary) {
  const Scenario& s = ctx.scenario;
  const Grid grid = s.grid();
  const Baselines b = baselines(s.params);
  summary = summary_base(s, grid, b);
  const MfgRun run = solve(s, s.initial.build(grid), grid);
  ctx.note(run.converged ? "fixed point converged in " + std::to_string(run.solution.iterations) +
                               " iterations"
                         : "fixed point did not converge; writing the last iterate");
  write_mfg_files(ctx, run, b, summary);
  return run.converged ? ExitCode::success : ExitCode::non_convergence;
}

ExitCode run_baselines(Context& ctx, json& summary) {
  const Scenario& s = ctx.scenario;
  const Grid grid = s.grid();
  const Baselines b = baselines(s.params);
  summary = summary_base(s, grid, b);
  const EnergyDistribution initial = s.initial.build(grid);

  auto population = [&](double power) {
    if (std::isnan(power)) return InterferenceTrajectory::constant(grid.n_time, kNaN);
    PolicyField field(grid.n_time, grid.n_energy + 1);
    for (std::size_t n = 0; n < grid.n_time; ++n) {
      for (std::size_t i = 1; i <= grid.n_energy; ++i) field(n, i) = power;
    }
    return interference_trajectory(fpk_forward(field, initial, grid), field, s.params);
  };
  const InterferenceTrajectory i_static = population(b.static_power);
  const InterferenceTrajectory i_repeated = population(b.repeated_power);

  CsvWriter interference(ctx.file("interference.csv"), {"t", "I_static", "I_repeated"});
  for (std::size_t n = 0; n < grid.n_time; ++n) {
    interference.row({grid.time(n), i_static[n], i_repeated[n]});
  }
  CsvWriter value(ctx.file("value_t0.csv"), {"E", "u_static", "u_repeated"});
  for (std::size_t i = 0; i <= grid.n_energy; ++i) {
    const double e = grid.energy(i);
    value.row({e, baseline_utility(b.static_power, e, i_static, grid, s.params),
               baseline_utility(b.repeated_power, e, i_repeated, grid, s.params)});
  }
  return ExitCode::success;
}

ExitCode run_channel(Context& ctx, json& summary) {
  const Scenario& s = ctx.scenario;
  const ChannelSettings& c = s.channel;
  const Grid grid = s.grid();
  summary = summary_base(s, grid, baselines(s.params));
  const ChannelDensity start = c.start == ChannelSettings::Start::stationary
                                   ? stationary_channel_density(c.mu, c.eta, c.grid)
                                   : point_mass(c.grid, c.start_point);
  const double duration = c.duration > 0.0 ? c.duration : s.params.horizon();
  const ChannelTrajectory traj = ou_fpk_forward(c.mu, c.eta, start, c.grid, duration, c.stride);
  const ChannelPolicy policy = channel_regime_policy(traj.slices.back(), c.grid, s.params);

  CsvWriter moments(ctx.file("channel_moments.csv"),
                    {"t", "mean_re", "mean_im", "second_moment", "boundary_mass", "tv_from_start"});
  for (std::size_t k = 0; k < traj.slices.size(); ++k) {
    const ChannelDensity& d = traj.slices[k];
    const std::complex<double> mean = d.mean(c.grid);
    moments.row({traj.times[k], mean.real(), mean.imag(), d.second_moment(c.grid, c.mu),
                 d.boundary_mass(), total_variation(start, d)});
  }
  CsvWriter density(ctx.file("channel_density.csv"), {"re", "im", "m"});
  CsvWriter power(ctx.file("channel_policy.csv"), {"re", "im", "p"});
  for (std::size_t a = 0; a < c.grid.cells; ++a) {
    for (std::size_t bb = 0; bb < c.grid.cells; ++bb) {
      density.row({c.grid.center(a), c.grid.center(bb), traj.slices.back().at(a, bb)});
      power.row({c.grid.center(a), c.grid.center(bb), policy.power[a * c.grid.cells + bb]});
    }
  }
  const StaticEquilibrium eq{policy.beta, EquilibriumMode::static_nash, s.params.load, true};
  summary["channel"] = {{"interference", policy.interference},
                        {"beta", policy.beta},
                        {"power_at_unit_gain", channel_regime_power(1.0, eq, s.params)},
                        {"clamped_cells", policy.clamped_cells},
                        {"max_boundary_mass", traj.max_boundary_mass},
                        {"boundary_ok", traj.max_boundary_mass < 1e-6},
                        {"max_mass_defect", traj.max_mass_defect},
                        {"scheme", to_string(c.grid.scheme)},
                        {"duration", duration}};
  return ExitCode::success;
}

ExitCode run_finite_sim(Context& ctx, json& summary) {
  const Scenario& s = ctx.scenario;
  const SimSettings& sim = s.simulation;
  const Grid grid = s.grid();
  const Baselines b = baselines(s.params);
  summary = summary_base(s, grid, b);
  const EnergyDistribution initial = s.initial.build(grid);
  const MfgRun run = solve(s, initial, grid);
  const EquilibriumSolution& sol = run.solution;
  write_mfg_files(ctx, run, b, summary);
  const InterferenceTrajectory reference =
      interference_trajectory(sol.density, sol.policy, s.params);

  PowerPolicy policy;
  switch (sim.policy) {
    case PolicySource::mfg_solution:
      policy = mfg_policy(sol);
      break;
    case PolicySource::static_nash:
      if (!b.static_nash) throw InfeasibleError("static Nash baseline does not exist");
      policy = static_policy(*b.static_nash, s.params);
      break;
    case PolicySource::repeated_op:
      if (!b.repeated) throw InfeasibleError("repeated operating point does not exist");
      policy = static_policy(*b.repeated, s.params);
      break;
    case PolicySource::constant:
      policy = constant_policy(sim.constant_power);
      break;
  }
  const EnergySampler sampler = node_sampler(initial, grid);

  std::vector<std::string> header{"t", "I_mfg"};
  for (std::size_t k : sim.players) header.push_back("I_K" + std::to_string(k));
  std::vector<std::vector<double>> series;
  CsvWriter table(ctx.file("sim_summary.csv"),
                  {"K", "N", "interference_error", "mean_utility", "reference_utility"});
  json runs = json::array();
  for (std::size_t k : sim.players) {
    SimConfig cfg;
    cfg.players = k;
    cfg.processing_gain = static_cast<double>(k) / s.params.load;
    cfg.dt = grid.dt();
    cfg.t_start = grid.t_start;
    cfg.t_end = grid.t_end;
    cfg.seed = s.seed;
    cfg.replications = sim.replications;
    cfg.source = sim.policy;
    cfg.constant_power = sim.constant_power;
    cfg.channel_mean = sim.channel_mean;
    cfg.channel_noise = sim.channel_noise;
    cfg.channel_start = {std::sqrt(s.params.channel_gain_mean), 0.0};
    const SimulationResult result = simulate(cfg, s.params, policy, sampler);

    double reference_utility = kNaN;
    if (sim.policy == PolicySource::mfg_solution) {
      double acc = 0.0;
      std::size_t count = 0;
      for (const auto& r : result.replications) {
        for (double e0 : r.initial_energy) {
          acc += average_utility_at_start(sol, e0);
          ++count;
        }
      }
      reference_utility = acc / static_cast<double>(count);
    }
    const double error = mean_interference_error(result, reference);
    table.row({static_cast<double>(k), cfg.processing_gain, error, result.mean_utility(),
               reference_utility});
    std::vector<double> mean(grid.n_time, 0.0);
    for (const auto& r : result.replications) {
      for (std::size_t n = 0; n < grid.n_time; ++n) mean[n] += r.interference[n];
    }
    for (double& m : mean) m /= static_cast<double>(result.replications.size());
    series.push_back(std::move(mean));
    runs.push_back({{"players", k}, {"interference_error", error},
                    {"mean_utility", result.mean_utility()}});
    ctx.note("simulated K = " + std::to_string(k));
  }
  CsvWriter out(ctx.file("sim_interference.csv"), header);
  for (std::size_t n = 0; n < grid.n_time; ++n) {
    std::vector<double> row{grid.time(n), reference[n]};
    for (const auto& sr : series) row.push_back(sr[n]);
    out.row(row);
  }
  summary["simulation"] = {{"policy", to_string(sim.policy)},
                           {"replications", sim.replications},
                           {"seed", s.seed},
                           {"runs", runs}};
  return run.converged ? ExitCode::success : ExitCode::non_convergence;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

RunReport run_scenario(const Scenario& input, const RunOptions& options) {
  RunReport report;
  Scenario scenario = input;
  if (options.seed) scenario.seed = *options.seed;
  const fs::path dir = options.out_dir ? *options.out_dir : scenario.output_dir;
  report.out_dir = dir;
  Context ctx{scenario, options, dir, report};
  const auto started = std::chrono::steady_clock::now();
  json summary;
  try {
    scenario.validate();
    fs::create_directories(dir);
    ctx.note("running " + scenario.name + " (" + to_string(scenario.regime) + ")");
    switch (scenario.regime) {
      case Regime::quasi_static:
        report.code = run_quasi_static(ctx, summary);
        break;
      case Regime::baselines:
        report.code = run_baselines(ctx, summary);
        break;
      case Regime::channel:
        report.code = run_channel(ctx, summary);
        break;
      case Regime::finite_sim:
        report.code = run_finite_sim(ctx, summary);
        break;
    }
  } catch (const ConfigError& e) {
    report.code = ExitCode::config_error;
    report.message = e.what();
    return report;
  } catch (const std::exception& e) {
    report.code = ExitCode::failure;
    report.message = e.what();
  }
  if (report.code == ExitCode::non_convergence) report.message = "fixed point did not converge";
  if (summary.is_null()) summary = json::object();
  summary["exit_code"] = static_cast<int>(report.code);
  if (!report.message.empty()) summary["message"] = report.message;
  summary["runtime_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  try {
    write_json(ctx.file("summary.json"), summary);
  } catch (const std::exception& e) {
    if (report.code == ExitCode::success) {
      report.code = ExitCode::failure;
      report.message = e.what();
    }
  }
  return report;
}

RunReport run(const std::string& target, const RunOptions& options) {
  if (fs::is_regular_file(target)) {
    try {
      return run_scenario(load_scenario(target), options);
    } catch (const ConfigError& e) {
      RunReport r;
      r.code = ExitCode::config_error;
      r.message = e.what();
      return r;
    }
  }
  for (const Scenario& s : builtin_scenarios()) {
    if (s.name == target) return run_scenario(s, options);
  }
  RunReport r;
  r.code = ExitCode::config_error;
  r.message = "no config file or built-in scenario named '" + target + "'";
  return r;
}

}  // namespace mfeg
