// Experiment runner: trains RCPI-OVA, ERCPI or BRCPI on the benchmark
// environments and writes CSV results.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecoc_rl/ecoc_rl.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value experiment file");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--workers", c.workers, "worker threads");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--set", c.overrides, "override a config key (key=value), repeatable");
}

ecoc_rl::ExperimentSpec load_spec(const Common& c) {
  ecoc_rl::ExperimentSpec spec;
  if (!c.config.empty()) spec = ecoc_rl::parse_experiment(ecoc_rl::read_text_file(c.config));
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ecoc_rl::ConfigError("--set expects key=value, got '" + kv + "'");
    ecoc_rl::apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) spec.seed = *c.seed;
  if (c.workers) spec.workers = *c.workers;
  if (c.out) spec.out = *c.out;
  spec.validate();
  return spec;
}

void print_summary(const ecoc_rl::ResultSummary& s, bool timing) {
  std::cout << ecoc_rl::kSummaryCsvHeader << "\n" << ecoc_rl::summary_csv_row(s, timing) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECOC rollout policy iteration experiments"};
  app.require_subcommand(1);

  Common run_opts, actions_opts, rollouts_opts;
  auto* run = app.add_subcommand("run", "train and evaluate one experiment");
  add_common(run, run_opts);
  auto* sweep_a = app.add_subcommand("sweep-actions", "vary the number of actions (sweep.actions, sweep.algorithms)");
  add_common(sweep_a, actions_opts);
  auto* sweep_k = app.add_subcommand("sweep-rollouts", "vary the rollout count K (sweep.rollouts)");
  add_common(sweep_k, rollouts_opts);

  std::size_t code_actions = 0;
  double redundancy = 10.0;
  std::uint64_t code_seed = 0;
  auto* gen_codes = app.add_subcommand("gen-codes", "print a random coding matrix");
  gen_codes->add_option("--actions", code_actions, "number of actions")->required();
  gen_codes->add_option("--redundancy", redundancy, "code length factor r in C = r ln A");
  gen_codes->add_option("--seed", code_seed, "seed");

  std::size_t width = 50, height = 50;
  std::uint64_t maze_seed = 0;
  std::vector<double> probs{ecoc_rl::kDefaultMazeProbabilities.begin(), ecoc_rl::kDefaultMazeProbabilities.end()};
  auto* gen_maze = app.add_subcommand("gen-maze", "print a random maze");
  gen_maze->add_option("--width", width, "grid width");
  gen_maze->add_option("--height", height, "grid height");
  gen_maze->add_option("--seed", maze_seed, "seed");
  gen_maze->add_option("--probs", probs, "probabilities of -1, -10, -100 cells")->expected(3);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto spec = load_spec(run_opts);
      const auto s = ecoc_rl::run_experiment(spec);
      print_summary(s, spec.timing);
      for (const auto& r : s.repetitions)
        if (!r.ok) std::cerr << "repetition " << r.repetition << " failed: " << r.error << "\n";
      return s.failed == s.repetitions.size() ? 1 : 0;
    }
    if (sweep_a->parsed()) {
      const auto spec = load_spec(actions_opts);
      const auto cells = ecoc_rl::sweep_actions(spec, spec.sweep_actions);
      std::cout << ecoc_rl::kSummaryCsvHeader << "\n";
      for (const auto& c : cells) {
        std::cout << ecoc_rl::summary_csv_row(c.summary, spec.timing) << "\n";
        if (!c.error.empty()) std::cerr << "A=" << c.x << " failed: " << c.error << "\n";
      }
      return 0;
    }
    if (sweep_k->parsed()) {
      const auto spec = load_spec(rollouts_opts);
      const auto cells = ecoc_rl::sweep_rollouts(spec, spec.sweep_rollouts);
      std::cout << "rollouts," << ecoc_rl::kSummaryCsvHeader << "\n";
      for (const auto& c : cells) {
        std::cout << c.x << ',' << ecoc_rl::summary_csv_row(c.summary, spec.timing) << "\n";
        if (!c.error.empty()) std::cerr << "K=" << c.x << " failed: " << c.error << "\n";
      }
      return 0;
    }
    if (gen_codes->parsed()) {
      ecoc_rl::Rng rng(code_seed);
      const auto m = ecoc_rl::generate_random_matrix(code_actions, ecoc_rl::code_length(code_actions, redundancy), rng);
      std::cout << ecoc_rl::to_text(m);
      std::cerr << "min distance " << m.min_distance() << "\n";
      return 0;
    }
    if (gen_maze->parsed()) {
      ecoc_rl::Rng rng(maze_seed);
      std::cout << ecoc_rl::to_text(ecoc_rl::generate_maze(width, height, {probs[0], probs[1], probs[2]}, rng));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
