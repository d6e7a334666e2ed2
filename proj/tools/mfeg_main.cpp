#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mfeg/runner.hpp"
#include "mfeg/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mean-field energy-efficient power control solvers"};
  app.require_subcommand(1);

  std::string target;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a scenario file or a built-in scenario");
  run->add_option("config", target, "Config file or built-in name (fig1..fig6)")->required();
  auto* out_opt = run->add_option("--out-dir", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Simulation seed");
  run->add_flag("--quiet", quiet, "No progress output");

  std::string scenario_dir = ".";
  auto* list = app.add_subcommand("list-scenarios", "List built-in and user scenarios");
  list->add_option("--scenario-dir", scenario_dir, "Directory searched for *.ini scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*list) {
    for (const auto& s : mfeg::list_scenarios(scenario_dir)) {
      std::cout << s.name << "  horizon=" << s.params.horizon()
                << "  m_T=" << s.initial.describe() << "  plot=" << (s.plot.empty() ? "-" : s.plot)
                << '\n';
    }
    return 0;
  }

  mfeg::RunOptions options;
  if (*out_opt) options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  options.quiet = quiet;
  options.log = &std::cerr;
  const mfeg::RunReport report = mfeg::run(target, options);
  if (!report.message.empty()) std::cerr << "mfeg: " << report.message << '\n';
  if (!quiet && report.code == mfeg::ExitCode::success) {
    std::cerr << "wrote " << report.files.size() << " files to " << report.out_dir.string() << '\n';
  }
  return static_cast<int>(report.code);
}
