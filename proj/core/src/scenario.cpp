#include "mfeg/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mfeg/errors.hpp"

namespace mfeg {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"name", "regime", "plot"}},
      {"model",
       {"rate", "noise_power", "load", "energy_max", "t_start", "horizon", "p_max",
        "channel_gain_mean", "success_shape"}},
      {"grid", {"n_energy", "n_time", "cfl_margin"}},
      {"initial", {"distribution", "threshold"}},
      {"fixed_point",
       {"damping", "tolerance", "max_iterations", "initial_guess", "prox_weight"}},
      {"channel",
       {"mu_re", "mu_im", "eta", "half_width", "cells", "dt", "scheme", "duration", "start",
        "start_re", "start_im", "stride"}},
      {"simulation",
       {"players", "replications", "policy", "constant_power", "channel_noise", "mu_re",
        "mu_im", "seed"}},
      {"output", {"directory", "time_stride"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

  std::string text(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(key);
    if (!v || v->empty()) throw ConfigError("missing required field '" + key + "'");
    return *v;
  }

  template <class T>
  void read(const std::string& key, T& out) const {
    auto raw = tree_.get_optional<std::string>(key);
    if (!raw) return;
    std::istringstream in(*raw);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof()) {
      throw ConfigError("invalid value for '" + key + "': '" + *raw + "'");
    }
    out = value;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("unknown field '" + section + "." + key + "'");
      }
    }
  }
}

Regime parse_regime(const std::string& s) {
  if (s == "quasi_static") return Regime::quasi_static;
  if (s == "channel") return Regime::channel;
  if (s == "finite_sim") return Regime::finite_sim;
  if (s == "baselines") return Regime::baselines;
  throw ConfigError("invalid value for 'scenario.regime': '" + s + "'");
}

PolicySource parse_policy(const std::string& s) {
  if (s == "mfg_solution") return PolicySource::mfg_solution;
  if (s == "static_nash") return PolicySource::static_nash;
  if (s == "repeated_op") return PolicySource::repeated_op;
  if (s == "constant") return PolicySource::constant;
  throw ConfigError("invalid value for 'simulation.policy': '" + s + "'");
}

std::vector<std::size_t> parse_players(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream one(item);
    std::size_t k = 0;
    one >> k;
    if (one.fail() || !(one >> std::ws).eof()) {
      throw ConfigError("invalid value for 'simulation.players': '" + s + "'");
    }
    out.push_back(k);
  }
  if (out.empty()) throw ConfigError("invalid value for 'simulation.players': '" + s + "'");
  return out;
}

Scenario from_tree(const pt::ptree& tree) {
  check_keys(tree);
  const Reader r(tree);
  Scenario s;
  s.name = r.text("scenario.name");
  s.regime = parse_regime(r.text("scenario.regime"));
  double horizon = 0.0;
  if (!r.has("model.horizon")) throw ConfigError("missing required field 'model.horizon'");
  r.read("model.horizon", horizon);
  if (s.regime != Regime::channel) {
    const std::string dist = r.text("initial.distribution");
    if (dist == "uniform") {
      s.initial.kind = InitialSpec::Kind::uniform;
    } else if (dist == "threshold") {
      s.initial.kind = InitialSpec::Kind::threshold;
      if (!r.has("initial.threshold")) {
        throw ConfigError("missing required field 'initial.threshold'");
      }
    } else {
      throw ConfigError("invalid value for 'initial.distribution': '" + dist + "'");
    }
    r.read("initial.threshold", s.initial.threshold);
  }
  if (r.has("scenario.plot")) s.plot = r.text("scenario.plot");

  ModelParams& m = s.params;
  r.read("model.rate", m.rate);
  r.read("model.noise_power", m.noise_power);
  r.read("model.load", m.load);
  r.read("model.energy_max", m.energy_max);
  r.read("model.t_start", m.t_start);
  m.t_end = m.t_start + horizon;
  r.read("model.p_max", m.p_max);
  r.read("model.channel_gain_mean", m.channel_gain_mean);
  if (r.has("model.success_shape")) {
    double shape = 0.0;
    r.read("model.success_shape", shape);
    if (!(shape > 0.0)) throw ConfigError("invalid value for 'model.success_shape'");
    m.success = SuccessFunction::exponential(shape);
  }

  r.read("grid.n_energy", s.n_energy);
  r.read("grid.n_time", s.n_time);
  r.read("grid.cfl_margin", s.cfl_margin);

  FixedPointConfig& f = s.fixed_point;
  r.read("fixed_point.damping", f.damping);
  r.read("fixed_point.tolerance", f.tolerance);
  r.read("fixed_point.max_iterations", f.max_iterations);
  r.read("fixed_point.prox_weight", f.prox_weight);
  if (r.has("fixed_point.initial_guess")) {
    const std::string g = r.text("fixed_point.initial_guess");
    if (g == "zero") {
      f.initial_guess = InitialGuess::zero;
    } else if (g == "static_nash_level") {
      f.initial_guess = InitialGuess::static_nash_level;
    } else {
      throw ConfigError("invalid value for 'fixed_point.initial_guess': '" + g + "'");
    }
  }

  ChannelSettings& c = s.channel;
  double re = c.mu.real(), im = c.mu.imag();
  r.read("channel.mu_re", re);
  r.read("channel.mu_im", im);
  c.mu = {re, im};
  r.read("channel.eta", c.eta);
  r.read("channel.half_width", c.grid.half_width);
  r.read("channel.cells", c.grid.cells);
  r.read("channel.dt", c.grid.dt);
  r.read("channel.duration", c.duration);
  r.read("channel.stride", c.stride);
  if (r.has("channel.scheme")) {
    const std::string sch = r.text("channel.scheme");
    if (sch == "exponential_fitting") {
      c.grid.scheme = DriftScheme::exponential_fitting;
    } else if (sch == "upwind") {
      c.grid.scheme = DriftScheme::upwind;
    } else {
      throw ConfigError("invalid value for 'channel.scheme': '" + sch + "'");
    }
  }
  if (r.has("channel.start")) {
    const std::string st = r.text("channel.start");
    if (st == "stationary") {
      c.start = ChannelSettings::Start::stationary;
    } else if (st == "point") {
      c.start = ChannelSettings::Start::point;
    } else {
      throw ConfigError("invalid value for 'channel.start': '" + st + "'");
    }
  }
  re = c.start_point.real();
  im = c.start_point.imag();
  r.read("channel.start_re", re);
  r.read("channel.start_im", im);
  c.start_point = {re, im};

  SimSettings& sim = s.simulation;
  if (r.has("simulation.players")) sim.players = parse_players(r.text("simulation.players"));
  r.read("simulation.replications", sim.replications);
  if (r.has("simulation.policy")) sim.policy = parse_policy(r.text("simulation.policy"));
  r.read("simulation.constant_power", sim.constant_power);
  r.read("simulation.channel_noise", sim.channel_noise);
  re = sim.channel_mean.real();
  im = sim.channel_mean.imag();
  r.read("simulation.mu_re", re);
  r.read("simulation.mu_im", im);
  sim.channel_mean = {re, im};
  r.read("simulation.seed", s.seed);

  if (r.has("output.directory")) s.output_dir = r.text("output.directory");
  r.read("output.time_stride", s.output_stride);

  s.validate();
  return s;
}

Scenario reference(std::string name, double horizon, std::string plot) {
  Scenario s;
  s.name = std::move(name);
  s.plot = std::move(plot);
  s.params.t_end = s.params.t_start + horizon;
  s.output_dir = s.name;
  return s;
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::quasi_static:
      return "quasi_static";
    case Regime::channel:
      return "channel";
    case Regime::finite_sim:
      return "finite_sim";
    case Regime::baselines:
      return "baselines";
  }
  return "unknown";
}

EnergyDistribution InitialSpec::build(const Grid& grid) const {
  return kind == Kind::uniform ? uniform_distribution(grid)
                               : threshold_distribution(grid, threshold);
}

std::string InitialSpec::describe() const {
  if (kind == Kind::uniform) return "uniform";
  std::ostringstream out;
  out << "0 if E <= " << threshold << ", else uniform";
  return out.str();
}

Grid Scenario::grid() const {
  if (n_time == 0) return Grid::with_cfl_margin(params, n_energy, cfl_margin);
  return Grid{n_energy, n_time, params.energy_max, params.t_start, params.t_end};
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("missing required field 'scenario.name'");
  params.validate();
  if (!(cfl_margin >= 1.0)) throw ConfigError("grid: cfl_margin must be at least 1");
  if (output_stride < 1) throw ConfigError("output: time_stride must be at least 1");
  const Grid g = grid();
  g.validate(params);
  fixed_point.validate();
  if (initial.kind == InitialSpec::Kind::threshold &&
      !(initial.threshold >= 0.0 && initial.threshold < params.energy_max)) {
    throw ConfigError("initial: threshold must lie in [0, energy_max)");
  }
  if (regime == Regime::channel) {
    channel.grid.validate(channel.mu, channel.eta);
    if (channel.start == ChannelSettings::Start::stationary && !(channel.eta > 0.0)) {
      throw ConfigError("channel: a stationary start needs eta > 0");
    }
  }
  if (regime == Regime::finite_sim) {
    if (simulation.replications < 1) throw ConfigError("simulation: replications must be >= 1");
    for (std::size_t k : simulation.players) {
      if (k < 1) throw ConfigError("simulation: players must be >= 1");
    }
    if (simulation.channel_noise < 0.0) {
      throw ConfigError("simulation: channel_noise must be non-negative");
    }
  }
}

Scenario parse_scenario(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  return from_tree(tree);
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config '" + file.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out{
      reference("fig1", 20.0, "p* vs (t, E)"),
      reference("fig2", 20.0, "p* vs t"),
      reference("fig3", 20.0, "m_t vs (t, E)"),
      reference("fig4", 20.0, "m_t vs (t, E)"),
      reference("fig5", 120.0, "p* vs t"),
      reference("fig6", 120.0, "v_t(E, t=0) vs E"),
  };
  out[3].initial = {InitialSpec::Kind::threshold, 18.0};
  return out;
}

std::vector<Scenario> list_scenarios(const std::filesystem::path& user_dir) {
  std::vector<Scenario> out = builtin_scenarios();
  if (user_dir.empty() || !std::filesystem::is_directory(user_dir)) return out;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(user_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ini") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.push_back(load_scenario(f));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace mfeg
