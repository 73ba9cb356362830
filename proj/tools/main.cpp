// chance-rrt: batch runs, planner comparisons and sensor-noise sweeps.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chance_rrt/errors.hpp"
#include "chance_rrt/harness.hpp"
#include "chance_rrt/report.hpp"
#include "chance_rrt/scenario.hpp"

namespace {

using namespace chance_rrt;

constexpr int kExitScenario = 1;
constexpr int kExitIo = 2;

struct BatchArgs {
  std::string scenario;
  std::string out = "out";
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

std::vector<PlannerMode> parse_modes(const std::string& list) {
  std::vector<PlannerMode> modes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      modes.push_back(parse_mode(item));
    } catch (const DomainError& e) {
      throw ScenarioError("--modes", e.what());
    }
  }
  if (modes.empty()) throw ScenarioError("--modes", "no planner modes given");
  return modes;
}

int run_batch_command(const BatchArgs& args, const std::vector<PlannerMode>& modes) {
  const Scenario scenario = load_scenario(args.scenario);
  const int trials = args.trials.value_or(scenario.trials);
  if (trials < 0) throw ScenarioError("--trials", "must be >= 0");
  const std::uint64_t seed = args.seed.value_or(scenario.base_seed);
  const BatchResult batch = run_batch(scenario, modes, trials, seed, args.threads);
  write_report(args.out, scenario, batch);
  std::cout << format_metrics_csv(batch.metrics);
  return 0;
}

void add_batch_options(CLI::App* cmd, BatchArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")->required();
  cmd->add_option("--trials", args.trials, "Trials per mode (default: scenario value)");
  cmd->add_option("--seed", args.seed, "Base seed; trial i uses seed + i (default: scenario value)");
  cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
  cmd->add_option("--threads", args.threads, "Worker threads (default: CHANCE_RRT_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-bounded RRT planning toolkit"};
  app.require_subcommand(1);

  BatchArgs run_args;
  std::string mode = "pu";
  auto* run = app.add_subcommand("run", "Run one planner mode over a batch of trials");
  add_batch_options(run, run_args);
  run->add_option("--mode", mode, "pu, cc or cl")->capture_default_str();

  BatchArgs cmp_args;
  std::string modes = "pu,cc,cl";
  auto* compare = app.add_subcommand("compare", "Run several planner modes on paired seeds");
  add_batch_options(compare, cmp_args);
  compare->add_option("--modes", modes, "Comma-separated modes")->capture_default_str();

  std::string profile;
  std::string sweep_out = "out";
  auto* sweep = app.add_subcommand("sense-sweep", "Fused variance over a distance/azimuth grid");
  sweep->add_option("--profile", profile, "Sensor profile or sweep JSON file")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_batch_command(run_args, parse_modes(mode));
    if (*compare) return run_batch_command(cmp_args, parse_modes(modes));
    if (*sweep) {
      const SweepConfig cfg = load_sweep_config(profile);
      const auto cells = sense_sweep(cfg);
      std::error_code ec;
      std::filesystem::create_directories(sweep_out, ec);
      if (ec) throw IoError("cannot create output directory " + sweep_out);
      const std::string csv = format_sweep_csv(cells);
      write_text_file(std::filesystem::path(sweep_out) / "sense_sweep.csv", csv);
      std::cout << csv;
      return 0;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  }
  return 0;
}
