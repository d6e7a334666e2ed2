#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfeg/errors.hpp"
#include "mfeg/runner.hpp"
#include "mfeg/scenario.hpp"

using namespace mfeg;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[scenario]
name = small
regime = quasi_static

[model]
horizon = 5

[grid]
n_energy = 20

[initial]
distribution = uniform

[fixed_point]
max_iterations = 400
)";

fs::path scratch(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "mfeg_unit" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(ParseScenario, ReadsSectionsAndDefaults) {
  const Scenario s = parse_scenario(kSmall);
  EXPECT_EQ(s.name, "small");
  EXPECT_EQ(s.regime, Regime::quasi_static);
  EXPECT_EQ(s.params.t_end, 5.0);
  EXPECT_EQ(s.n_energy, 20u);
  EXPECT_EQ(s.fixed_point.max_iterations, 400);
  EXPECT_EQ(s.params.rate, ModelParams{}.rate);
  EXPECT_EQ(s.initial.kind, InitialSpec::Kind::uniform);
}

TEST(ParseScenario, MissingFieldIsNamed) {
  try {
    parse_scenario("[scenario]\nname = x\nregime = quasi_static\n[initial]\ndistribution = uniform\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.horizon"), std::string::npos);
  }
  try {
    parse_scenario("");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("scenario.name"), std::string::npos);
  }
}

TEST(ParseScenario, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_scenario(std::string(kSmall) + "[grid]\ncolour = red\n"), ConfigError);
  std::string bad = kSmall;
  bad.replace(bad.find("horizon = 5"), 11, "horizon = x");
  EXPECT_THROW(parse_scenario(bad), ConfigError);
  std::string neg = kSmall;
  neg.replace(neg.find("horizon = 5"), 11, "horizon = -5");
  EXPECT_THROW(parse_scenario(neg), ConfigError);
}

TEST(ParseScenario, ChannelRegimeNeedsNoInitialLaw) {
  const Scenario s = parse_scenario(
      "[scenario]\nname = ch\nregime = channel\n[model]\nhorizon = 20\n[channel]\nmu_re = 0.5\n");
  EXPECT_EQ(s.regime, Regime::channel);
  EXPECT_EQ(s.channel.mu.real(), 0.5);
}

TEST(BuiltinScenarios, SixRowsWithHorizons) {
  const auto all = builtin_scenarios();
  ASSERT_EQ(all.size(), 6u);
  const double horizons[] = {20, 20, 20, 20, 120, 120};
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(all[k].name, "fig" + std::to_string(k + 1));
    EXPECT_EQ(all[k].params.t_end - all[k].params.t_start, horizons[k]);
    EXPECT_NO_THROW(all[k].validate());
  }
}

TEST(ListScenarios, AddsUserFiles) {
  const fs::path dir = scratch("list");
  std::ofstream(dir / "extra.ini") << kSmall;
  std::ofstream(dir / "broken.ini") << "[scenario]\n";
  const auto all = list_scenarios(dir);
  ASSERT_EQ(all.size(), 7u);
  EXPECT_EQ(all.back().name, "small");
}

TEST(FormatNumber, Canonical) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}

TEST(Runner, WritesRectangularCsvAndRepeatsBytes) {
  Scenario s = parse_scenario(kSmall);
  RunOptions o;
  o.out_dir = scratch("run_a");
  const auto a = run_scenario(s, o);
  ASSERT_EQ(a.code, ExitCode::success) << a.message;
  o.out_dir = scratch("run_b");
  const auto b = run_scenario(s, o);
  ASSERT_EQ(b.code, ExitCode::success);
  for (const char* name : {"policy.csv", "density.csv", "interference.csv", "value_t0.csv"}) {
    const auto rows = read_csv(a.out_dir / name);
    ASSERT_GT(rows.size(), 1u) << name;
    for (const auto& r : rows) EXPECT_EQ(r.size(), rows.front().size()) << name;
    EXPECT_EQ(slurp(a.out_dir / name), slurp(b.out_dir / name)) << name;
  }
  EXPECT_TRUE(fs::exists(a.out_dir / "summary.json"));
  const auto value = read_csv(a.out_dir / "value_t0.csv");
  EXPECT_EQ(value.front(), (std::vector<std::string>{"E", "v_mfg", "u_static", "u_repeated"}));
  EXPECT_EQ(value.size(), s.n_energy + 2);
}

TEST(Runner, NonConvergenceExitsWithTwoAndWritesDiagnostics) {
  Scenario s = parse_scenario(kSmall);
  s.fixed_point.max_iterations = 2;
  RunOptions o;
  o.out_dir = scratch("nonconv");
  const auto r = run_scenario(s, o);
  EXPECT_EQ(r.code, ExitCode::non_convergence);
  EXPECT_TRUE(fs::exists(r.out_dir / "interference.csv"));
  EXPECT_TRUE(fs::exists(r.out_dir / "summary.json"));
}

TEST(Runner, BaselinesRegime) {
  Scenario s = parse_scenario(kSmall);
  s.regime = Regime::baselines;
  RunOptions o;
  o.out_dir = scratch("baselines");
  const auto r = run_scenario(s, o);
  ASSERT_EQ(r.code, ExitCode::success) << r.message;
  const auto rows = read_csv(r.out_dir / "interference.csv");
  EXPECT_EQ(rows.front(), (std::vector<std::string>{"t", "I_static", "I_repeated"}));
  EXPECT_EQ(rows[1][1], "0.9");
}

TEST(Runner, UnknownTargetIsConfigError) {
  EXPECT_EQ(run("no_such_scenario_or_file").code, ExitCode::config_error);
}
